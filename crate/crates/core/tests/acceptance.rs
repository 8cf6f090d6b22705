//! Acceptance criteria, one line of output each.
//!
//! Runs as a plain program (no libtest harness) so that every criterion
//! reports its verdict even when an earlier one fails. Pass criterion
//! numbers as arguments to run a subset, e.g. `cargo test --test acceptance -- 2 10`.
//!
//! The reference values here are computed in this file from closed formulas
//! or by direct brute force, never by asking the library.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use odd_unitary::endo::EndoContext;
use odd_unitary::groups::FiniteGroup;
use odd_unitary::harness::classical::odd_orthogonal_space;
use odd_unitary::harness::{run_campaign, CampaignReport, ExperimentConfig, HarnessOptions, RunReport};
use odd_unitary::levels::{verify_lambda, LevelSpace};
use odd_unitary::quad::{heis_poly_check, HeisZ};
use odd_unitary::{Error, Mat, Ring, RingSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const CAP: usize = 4_000_000;

fn main() {
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("quadratic structure axioms and seeded defects", c1_axioms),
        ("Heisenberg ring embeds in Z[T]/(T^2 - 2T)", c2_heisenberg),
        ("relation calculus NQ, LT and T", c3_relations),
        ("Lambda lemma and the odd orthogonal Lambda", c4_lambda),
        ("Chevalley containments in BC3", c5_chevalley),
        ("perfection and boundary generation", c6_groups),
        ("level round trip on five distinct classes", c7_round_trip),
        ("exhaustive sandwich at l = 3", c8_sandwich),
        ("sampled sandwich at l = 4", c9_sampled),
        ("classical identification and level counts", c10_classical),
        ("reports are deterministic", c11_determinism),
    ];
    let mut failed = 0;
    for (x, (title, run)) in criteria.iter().enumerate() {
        let n = x + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {title} ({detail}; {secs:.1} s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {why} ({secs:.1} s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

// ---- helpers ----

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn campaign(cfg: &ExperimentConfig, name: &str) -> Result<CampaignReport, String> {
    let prep = cfg.prepare().map_err(|e| format!("config: {e}"))?;
    run_campaign(name, &prep, &HarnessOptions { timings: false }).map_err(|e| format!("{name}: {e}"))
}

fn all_green(rep: &CampaignReport) -> Result<(), String> {
    let bad: Vec<String> = rep
        .failures()
        .take(3)
        .map(|(s, c)| format!("[{}] {} {}", s.title, c.name, c.witness.as_deref().unwrap_or("")))
        .collect();
    ensure(bad.is_empty() && rep.passed(), || format!("{} failed: {}", rep.campaign, bad.join("; ")))
}

fn check_passes(rep: &CampaignReport, section: &str, name: &str) -> Result<u64, String> {
    let c = rep.check(section, name).ok_or_else(|| format!("no check '{name}' in section '{section}'"))?;
    ensure(c.status == "pass", || format!("'{name}' in '{section}' failed: {}", c.witness.as_deref().unwrap_or("")))?;
    Ok(c.cases)
}

fn order_of(rep: &CampaignReport, name: &str) -> Result<u128, String> {
    rep.order(name).ok_or_else(|| format!("no order '{name}'"))?.parse().map_err(|_| format!("order '{name}' is not a number"))
}

fn config(n: u32, lambda: i64, l: usize, r0: usize, param: &str, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::standard(n, lambda, l, r0, param);
    cfg.seed = seed;
    cfg
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Orders of the finite classical groups over `F_q`.
fn sp_order(n: u32, q: u128) -> u128 {
    q.pow(n * n) * (1..=n).map(|i| q.pow(2 * i) - 1).product::<u128>()
}

/// Split orthogonal group `O+(2n, q)`.
fn o_plus_order(n: u32, q: u128) -> u128 {
    2 * q.pow(n * (n - 1)) * (q.pow(n) - 1) * (1..n).map(|i| q.pow(2 * i) - 1).product::<u128>()
}

fn divisors(n: u32) -> usize {
    (1..=n).filter(|d| n % d == 0).count()
}

fn residue(k: &Ring, g: &Mat, r: usize, c: usize) -> i64 {
    k.residues(g.get(r, c))[0] as i64
}

/// Elements of `U(P)` by the space's own enumeration, as matrices.
fn unitary_elements(space: &odd_unitary::forms::QuadraticSpace) -> Result<Vec<Mat>, String> {
    let keys = space.unitary_group_keys(CAP).map_err(|e| e.to_string())?;
    let codec = FiniteGroup::trivial(&space.ring, space.dim(), CAP).map_err(|e| e.to_string())?.codec();
    Ok(keys.into_iter().map(|k| codec.decode(k)).collect())
}

// ---- 1 ----

fn c1_axioms() -> Outcome {
    let t = Instant::now();
    let rep = campaign(&config(2, 1, 3, 0, "maximal", 1), "check-axioms")?;
    let elapsed = t.elapsed();
    all_green(&rep)?;
    let rings: Vec<&str> = rep.sections.iter().filter_map(|s| s.title.strip_prefix("axioms over ")).collect();
    ensure(rings.len() == 4, || format!("expected four rings, got {rings:?}"))?;
    for s in rep.sections.iter().filter(|s| s.title.starts_with("axioms over ")) {
        ensure(s.checks.len() >= 10 && s.checks.iter().all(|c| c.cases > 0), || format!("{}: too few checks", s.title))?;
    }
    let defects = rep.section("seeded defects").ok_or("no seeded defects section")?;
    ensure(defects.checks.len() == 4, || "expected four seeded defects".into())?;
    ensure(defects.notes.len() == 4 && defects.notes.iter().all(|n| n.contains("failed")), || format!("each defect needs a witness: {:?}", defects.notes))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("rings {}, 4 defects caught with witnesses", rings.join(", ")))
}

// ---- 2 ----

/// `Heis(Z)` written out independently: `(x, y) + (x', y') = (x + x', y + y' - x x')`
/// and `(x, y)(x', y') = (x x', x^2 y' + x'^2 y + 2 y y')`.
fn heis_add(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    (a.0 + b.0, a.1 + b.1 - a.0 * b.0)
}

fn heis_mul(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    (a.0 * b.0, a.0 * a.0 * b.1 + b.0 * b.0 * a.1 + 2 * a.1 * b.1)
}

/// `a + bT` evaluated at `T = 0` and `T = 2`. Since `T^2 - 2T = T(T - 2)`, this is
/// an injective ring map `Z[T]/(T^2 - 2T) -> Z x Z` with componentwise operations.
fn eval(a: i128, b: i128) -> (i128, i128) {
    (a, a + 2 * b)
}

fn c2_heisenberg() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs = 10_000;
    for _ in 0..pairs {
        let mut draw = || (rng.gen_range(-1000i128..=1000), rng.gen_range(-1000i128..=1000));
        let (h, h2) = (draw(), draw());
        let r = heis_poly_check(HeisZ { x: h.0, y: h.1 }, HeisZ { x: h2.0, y: h2.1 }).map_err(|e| e.to_string())?;
        ensure(r.additive && r.multiplicative, || format!("library flags a failure at {h:?}, {h2:?}"))?;
        // Image x + (y + C(x, 2)) T.
        let image = |v: (i128, i128)| (v.0, v.1 + v.0 * (v.0 - 1) / 2);
        ensure((r.image.a, r.image.b) == image(h), || format!("image of {h:?}"))?;
        let e = |v: (i128, i128)| {
            let (a, b) = image(v);
            eval(a, b)
        };
        let (p, q) = (e(h), e(h2));
        ensure(e(heis_add(h, h2)) == (p.0 + q.0, p.1 + q.1), || format!("additivity at {h:?}, {h2:?}"))?;
        ensure(e(heis_mul(h, h2)) == (p.0 * q.0, p.1 * q.1), || format!("multiplicativity at {h:?}, {h2:?}"))?;
        let lib_sum = HeisZ { x: h.0, y: h.1 }.add(HeisZ { x: h2.0, y: h2.1 }).map_err(|e| e.to_string())?;
        let lib_prod = HeisZ { x: h.0, y: h.1 }.mul(HeisZ { x: h2.0, y: h2.1 }).map_err(|e| e.to_string())?;
        ensure((lib_sum.x, lib_sum.y) == heis_add(h, h2) && (lib_prod.x, lib_prod.y) == heis_mul(h, h2), || format!("operations at {h:?}, {h2:?}"))?;
    }
    let edge = HeisZ { x: 1_000_000, y: -1_000_000 };
    ensure(heis_poly_check(edge, edge).map(|r| r.additive && r.multiplicative).unwrap_or(false), || "bound 10^6 rejected".into())?;
    let over = heis_poly_check(HeisZ { x: 1_000_001, y: 0 }, edge);
    ensure(matches!(over, Err(Error::Overflow(_))), || "input above 10^6 accepted".into())?;
    Ok(format!("{pairs} pairs agree with the evaluation map into Z x Z"))
}

// ---- 3 ----

fn c3_relations() -> Outcome {
    let t = Instant::now();
    let mut runs = 0;
    for r0 in [0, 1] {
        for param in ["minimal", "maximal"] {
            let mut cfg = config(2, 1, 3, r0, param, 3);
            cfg.relations.budget = 1 << 16;
            cfg.relations.chevalley = false;
            cfg.relations.mutations = false;
            let rep = campaign(&cfg, "relations")?;
            all_green(&rep)?;
            for (sec, names) in [("LT", 1..=4), ("T", 1..=8)] {
                for k in names {
                    let name = format!("{sec}{k}");
                    check_passes(&rep, sec, &name)?;
                    let c = rep.check(sec, &name).unwrap();
                    ensure(c.note.as_deref() == Some("exhaustive per block"), || format!("{name} at r0 = {r0}, {param}: not exhaustive"))?;
                }
            }
            runs += 1;
        }
    }
    let mut cfg = config(4, 1, 3, 1, "minimal", 11);
    cfg.relations.trials = 10_000;
    cfg.relations.chevalley = false;
    let rep = campaign(&cfg, "relations")?;
    all_green(&rep)?;
    let mut min_cases = u64::MAX;
    for k in 1..=10 {
        min_cases = min_cases.min(check_passes(&rep, "NQ", &format!("NQ{k}"))?);
    }
    ensure(min_cases >= 10_000, || format!("only {min_cases} NQ samples"))?;
    let defects = rep.section("seeded defects").ok_or("no seeded defects")?;
    ensure(defects.checks.len() == 5, || "expected four defects and a control".into())?;
    ensure(t.elapsed() < Duration::from_secs(300), || format!("took {:?}", t.elapsed()))?;
    Ok(format!("T and LT exhaustive on {runs} spaces over F2; NQ on >= {min_cases} samples each over Z/4"))
}

// ---- 4 ----

fn level_space(space: &odd_unitary::forms::QuadraticSpace) -> Result<LevelSpace, String> {
    EndoContext::new(space).and_then(|c| LevelSpace::new(&c)).map_err(|e| e.to_string())
}

fn c4_lambda() -> Outcome {
    for (n, r0, param) in [(2, 0, "maximal"), (2, 0, "minimal"), (2, 1, "minimal"), (3, 0, "maximal"), (3, 1, "minimal")] {
        let prep = config(n, 1, 3, r0, param, 1).prepare().map_err(|e| e.to_string())?;
        let ls = level_space(&prep.space)?;
        let r = verify_lambda(&ls);
        ensure(r.all_passed(), || format!("F{n}, r0 = {r0}, {param}: {:?}", r.failures().next().map(|f| &f.name)))?;
    }

    // Lambda_i against brute force: h is in Lambda_i exactly when tau_i(h)
    // lies in the enumerated U(P).
    let prep = config(2, 1, 3, 0, "minimal", 1).prepare().map_err(|e| e.to_string())?;
    let up: BTreeSet<Vec<u8>> = unitary_elements(&prep.space)?.iter().map(mat_bytes).collect();
    ensure(up.len() as u128 == o_plus_order(3, 2), || format!("|U(P)| = {}", up.len()))?;
    let ls = level_space(&prep.space)?;
    let c = &ls.ctx;
    for i in c.hyperbolic() {
        let brute: Vec<_> = c.carrier_elements(i).into_iter().filter(|h| up.contains(&mat_bytes(&c.tau_ultra(i, h).unwrap()))).collect();
        let lib: BTreeSet<_> = ls.lambda.block(i).iter().collect();
        ensure(brute.len() == lib.len() && brute.iter().all(|h| lib.contains(h)), || format!("Lambda_{i}: brute force {} vs {}", brute.len(), lib.len()))?;
    }

    // Odd orthogonal: Lambda_i = 0, and no nonzero carrier element gives a unitary tau_i(h).
    let f2 = Ring::new(&RingSpec::modular(2, 1)).unwrap();
    let mut nonzero_tested = 0;
    for l in [2, 3] {
        let space = odd_orthogonal_space(&f2, l).map_err(|e| e.to_string())?;
        let ls = level_space(&space)?;
        let c = &ls.ctx;
        ensure(verify_lambda(&ls).all_passed(), || format!("odd orthogonal l = {l}: Lambda lemma"))?;
        for i in c.hyperbolic() {
            let b = ls.lambda.block(i);
            ensure(b.iter().all(|h| c.h_is_zero(h)), || format!("odd orthogonal l = {l}: Lambda_{i} is not zero"))?;
        }
        if l == 2 {
            let up_elems = unitary_elements(&space)?;
            ensure(up_elems.len() as u128 == o_plus_order(2, 2), || format!("|U(P)| = {}", up_elems.len()))?;
            let up: BTreeSet<Vec<u8>> = up_elems.iter().map(mat_bytes).collect();
            for i in c.hyperbolic() {
                for h in c.carrier_elements(i).into_iter().filter(|h| !c.h_is_zero(h)) {
                    nonzero_tested += 1;
                    ensure(!up.contains(&mat_bytes(&c.tau_ultra(i, &h).unwrap())), || format!("tau_{i}({}) is unitary", c.show_h(&h)))?;
                }
            }
        }
    }
    Ok(format!("lemma holds on 5 spaces; Lambda_i matches brute force; odd orthogonal Lambda_i = 0 ({nonzero_tested} nonzero h rejected)"))
}

fn mat_bytes(m: &Mat) -> Vec<u8> {
    (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))).map(|(r, c)| m.get(r, c).0).collect()
}

// ---- 5 ----

/// Ordered pairs of roots of BC_l that are not negatively proportional.
/// A root paired with itself counts, since ultrashort root subgroups are
/// not abelian.
fn bc_pairs(l: usize) -> usize {
    let mut roots: Vec<Vec<i32>> = Vec::new();
    for i in 0..l {
        for s in [1, -1, 2, -2] {
            let mut v = vec![0; l];
            v[i] = s;
            roots.push(v);
        }
        for j in i + 1..l {
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![0; l];
                v[i] = a;
                v[j] = b;
                roots.push(v);
            }
        }
    }
    let mut n = 0;
    for a in &roots {
        for b in &roots {
            let neg = |c: i32, d: i32| a.iter().zip(b).all(|(x, y)| c * x + d * y == 0);
            if !(neg(1, 1) || neg(2, 1) || neg(1, 2)) {
                n += 1;
            }
        }
    }
    n
}

fn c5_chevalley() -> Outcome {
    let expected = bc_pairs(3);
    ensure(expected == 540, || format!("BC3 pair count {expected}"))?;
    for (r0, param) in [(0, "maximal"), (0, "minimal"), (1, "minimal")] {
        let mut cfg = config(2, 1, 3, r0, param, 5);
        cfg.relations.mutations = false;
        let rep = campaign(&cfg, "relations")?;
        let sec = rep.section("Chevalley at L0").ok_or("no Chevalley section")?;
        ensure(sec.status == "pass", || format!("r0 = {r0}, {param}: {:?}", sec.checks.iter().find(|c| c.status != "pass").map(|c| &c.witness)))?;
        let main = &sec.checks[0];
        ensure(main.note.as_deref().is_some_and(|n| n.starts_with(&format!("{expected} root pairs"))), || format!("note {:?}", main.note))?;
    }
    Ok(format!("{expected} root pairs on 3 spaces over F2"))
}

// ---- 6 ----

fn c6_groups() -> Outcome {
    let mut cfg = config(2, 1, 3, 1, "maximal", 6);
    cfg.levels.constructors = strings(&["l0", "scale(l0, 0)", "odd"]);
    cfg.groups.unitary = false;
    let rep = campaign(&cfg, "groups")?;
    all_green(&rep)?;
    // EO(7, F2) is isomorphic to Sp(6, F2).
    let eu = order_of(&rep, "EU(P)")?;
    ensure(eu == sp_order(3, 2), || format!("|EU(P)| = {eu}, expected {}", sp_order(3, 2)))?;
    let mut orders = Vec::new();
    for name in ["l0", "scale(l0, 0)", "odd"] {
        let sec = format!("groups at {name}");
        check_passes(&rep, &sec, "[EU(P, L), EU(P)] = EU(P, L)")?;
        check_passes(&rep, &sec, "boundary root subgroups generate EU(P, L) normally")?;
        let e = order_of(&rep, &format!("EU(P, {name})"))?;
        ensure(order_of(&rep, &format!("[EU(P, {name}), EU(P)]"))? == e && order_of(&rep, &format!("boundary group at {name}"))? == e, || format!("orders differ at {name}"))?;
        orders.push(format!("{name}: {e}"));
    }
    ensure(order_of(&rep, "EU(P, l0)")? == eu, || "EU(P, L0) is not EU(P)".into())?;
    Ok(orders.join(", "))
}

// ---- 7 ----

fn c7_round_trip() -> Outcome {
    let names = ["zero", "odd", "l0", "join(odd, l0)", "central"];
    let mut cfg = config(2, 1, 3, 1, "minimal", 7);
    cfg.levels.constructors = strings(&names);
    let rep = campaign(&cfg, "level")?;
    all_green(&rep)?;
    let mut eu_orders = BTreeSet::new();
    for name in names {
        let sec_title = format!("level {name}");
        check_passes(&rep, &sec_title, "level of EU(P, L) has the class of L")?;
        let sec = rep.section(&sec_title).unwrap();
        let o = sec.notes.iter().find_map(|n| n.strip_prefix("|EU(P, L)| = ")).ok_or_else(|| format!("{name}: no group order"))?;
        eu_orders.insert(o.parse::<u128>().map_err(|e| e.to_string())?);
    }
    // Pairwise different groups force pairwise different classes.
    ensure(eu_orders.len() == names.len(), || format!("EU orders {eu_orders:?}"))?;
    let classes = order_of(&rep, "distinct level classes")?;
    ensure(classes >= 5, || format!("{classes} classes"))?;
    Ok(format!("{classes} classes, |EU(P, L)| in {eu_orders:?}"))
}

// ---- 8 ----

fn c8_sandwich() -> Outcome {
    let rep = campaign(&config(2, 1, 3, 0, "minimal", 8), "sandwich")?;
    all_green(&rep)?;
    // U(P) is O+(6, F2) and EU(P) its index-two subgroup.
    let up = order_of(&rep, "U(P)")?;
    let eu = order_of(&rep, "EU(P)")?;
    ensure(up == o_plus_order(3, 2) && eu * 2 == up, || format!("|U(P)| = {up}, |EU(P)| = {eu}"))?;
    let mut verified = 0;
    let mut carried = 0;
    for s in rep.sections.iter().filter(|s| s.title.starts_with("sandwich for ")) {
        if s.notes.iter().any(|n| n.contains("verdict carried over")) {
            carried += 1;
            continue;
        }
        let group = s.title.trim_start_matches("sandwich for ");
        let low = check_passes(&rep, &s.title, "EU(P, L(G)) <= G")?;
        let high = check_passes(&rep, &s.title, "G <= GU'(P, floor L(G))")?;
        let g = order_of(&rep, group)?;
        ensure(low as u128 == order_of(&rep, &format!("EU(P, L({group}))"))? && high as u128 == g, || format!("{group}: not every element tested"))?;
        verified += 1;
    }
    ensure(rep.section("sandwich for U(P, zero)").is_some(), || "principal group missing".into())?;
    Ok(format!("{verified} groups checked elementwise, {carried} equal as sets to earlier ones"))
}

// ---- 9 ----

fn c9_sampled() -> Outcome {
    let t = Instant::now();
    let mut cfg = config(2, 1, 4, 0, "maximal", 3);
    cfg.sandwich.words = 1000;
    let rep = campaign(&cfg, "sandwich")?;
    all_green(&rep)?;
    let levels = ["zero", "l0", "ceil(l0)", "central", "full"];
    for name in levels {
        let sec = format!("sandwich for U(P, {name})");
        check_passes(&rep, &sec, "generators of EU(P, L(G)) lie in U(P, L')")?;
        let words = check_passes(&rep, &sec, "sampled words of G lie in GU'(P, floor L(G))")?;
        ensure(words >= 1000, || format!("{name}: {words} words"))?;
        check_passes(&rep, &sec, "sampled words of G lie in U(P, L')")?;
    }
    ensure(t.elapsed() < Duration::from_secs(600), || format!("took {:?}", t.elapsed()))?;
    Ok(format!("{} principal groups, 1000 words each", levels.len()))
}

// ---- 10 ----

fn c10_classical() -> Outcome {
    let mut cfg = config(3, 1, 2, 0, "minimal", 5);
    cfg.classical.field = 3;
    cfg.classical.l = 2;
    cfg.classical.between_moduli = vec![2, 4];
    cfg.classical.above_moduli = vec![2, 4];
    let rep = campaign(&cfg, "classical")?;
    all_green(&rep)?;
    let ident = rep.section("identification over F3, l = 2").ok_or("no identification")?;
    ensure(ident.notes.iter().any(|n| n == "lambda = 1, minimal L: U(P) = O(4, F3)"), || format!("{:?}", ident.notes))?;
    ensure(ident.notes.iter().any(|n| n.starts_with("lambda = -1") && n.ends_with("Sp(4, F3)")), || format!("{:?}", ident.notes))?;
    ensure(order_of(&rep, "O(4, F3)")? == o_plus_order(2, 3), || "|O(4, F3)|".into())?;
    ensure(order_of(&rep, "Sp(4, F3)")? == sp_order(2, 3), || "|Sp(4, F3)|".into())?;
    ensure(rep.section("odd orthogonal space over F2, l = 2").is_some_and(|s| s.status == "pass"), || "odd orthogonal".into())?;
    for n in [2, 4] {
        let found = order_of(&rep, &format!("levels between L0 and L1 over Z/{n}"))?;
        ensure(found as usize == divisors(n), || format!("Z/{n}: {found} levels between, {} ideals", divisors(n)))?;
    }

    // The enumerated U(P) preserves the split forms, checked directly.
    for (lam, what) in [(1i64, "quadratic"), (-1, "symplectic")] {
        let prep = config(3, lam, 2, 0, "minimal", 5).prepare().map_err(|e| e.to_string())?;
        let k = &prep.ring;
        let prof = prep.space.profile().clone();
        let d = prep.space.dim();
        let els = unitary_elements(&prep.space)?;
        let expected = if lam == 1 { o_plus_order(2, 3) } else { sp_order(2, 3) };
        ensure(els.len() as u128 == expected, || format!("lambda = {lam}: |U(P)| = {}", els.len()))?;
        let pos: Vec<usize> = (1..=2).flat_map(|i| prof.range(i)).collect();
        let col = |g: &Mat, c: usize| (0..d).map(|r| residue(k, g, r, c)).collect::<Vec<i64>>();
        let form = |u: &[i64], v: &[i64]| -> i64 {
            let s: i64 = pos.iter().map(|&p| {
                let q = prof.partner(p);
                if lam == 1 { u[p] * v[q] + u[q] * v[p] } else { u[p] * v[q] - u[q] * v[p] }
            }).sum();
            s.rem_euclid(3)
        };
        let unit = |c: usize| (0..d).map(|r| (r == c) as i64).collect::<Vec<i64>>();
        for g in &els {
            for a in 0..d {
                for b in 0..d {
                    let (ga, gb) = (col(g, a), col(g, b));
                    ensure(form(&ga, &gb) == form(&unit(a), &unit(b)), || format!("lambda = {lam}: an element does not preserve the {what} form"))?;
                }
            }
        }
    }

    // Odd orthogonal: every element of U(P) fixes e_0.
    let f2 = Ring::new(&RingSpec::modular(2, 1)).unwrap();
    let space = odd_orthogonal_space(&f2, 2).map_err(|e| e.to_string())?;
    let p0 = space.profile().range(0).start;
    let els = unitary_elements(&space)?;
    for g in &els {
        ensure((0..space.dim()).all(|r| residue(&f2, g, r, p0) == (r == p0) as i64), || "an element moves e_0".into())?;
    }
    Ok(format!("O(4, F3) = {}, Sp(4, F3) = {}, levels between match ideals of Z/2 and Z/4", o_plus_order(2, 3), sp_order(2, 3)))
}

// ---- 11 ----

fn c11_determinism() -> Outcome {
    let mut cfg = config(2, 1, 3, 1, "minimal", 11);
    cfg.campaigns = strings(&["check-axioms", "relations", "lambda", "classical"]);
    cfg.axioms.poly_pairs = 1000;
    let once = || -> Result<String, String> {
        let reps = cfg.campaigns.iter().map(|n| campaign(&cfg, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(RunReport::new(&cfg, reps, None).to_json())
    };
    let (a, b) = (once()?, once()?);
    ensure(a == b, || "two runs differ".into())?;
    let mut other = cfg.clone();
    other.seed = 12;
    let reps = vec![campaign(&other, "relations")?];
    let c = RunReport::new(&other, reps, None).to_json();
    ensure(!c.contains("timing_ms") && !a.contains("timing_ms") && !a.contains("timestamp"), || "timings leaked".into())?;
    Ok(format!("{} bytes, identical across runs", a.len()))
}
