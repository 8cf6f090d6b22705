//! The campaigns behind each subcommand.

use num_bigint::BigUint;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classical::{
    above_constraints, above_data, between_data, check_odd_orthogonal, eo_odd_generators, identify, ideal_count, l1_level, levels_above, levels_between,
    odd_orthogonal_space, show_ideal, AboveData,
};
use super::config::Prepared;
use super::{level_space, Builder, CampaignReport, HarnessOptions};
use crate::endo::{verify_adjoint, verify_lt, verify_nq, verify_t, EndoContext, EndoMutation};
use crate::error::{Error, Result};
use crate::forms::{build_standard_space, verify_space, BlockProfile, ParamChoice, DEFAULT_PARAM_CAP};
use crate::groups::FiniteGroup;
use crate::levels::{verify_lambda, AugLevel, GuOracle, LevelGroups, LevelSpace};
use crate::matrix::Mat;
use crate::quad::{heis_poly_check, verify_heis, verify_qa, verify_qr, verify_qs, ActionMutation, AlgebraBinding, BakStructure, HeisZ, StructureMutation, UniversalStructure};
use crate::report::{Check, Report};
use crate::ring::{Ring, RingSpec};

pub fn run_campaign(name: &str, prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    match name {
        "check-axioms" => axioms(prep, opts),
        "relations" => relations(prep, opts),
        "lambda" => lambda(prep, opts),
        "level" => level(prep, opts),
        "groups" => groups(prep, opts),
        "sandwich" => sandwich(prep, opts),
        "classical" => classical(prep, opts),
        other => Err(Error::Config(format!("unknown campaign '{other}'"))),
    }
}

fn from_checks(title: &str, checks: Vec<Check>) -> Report {
    let mut r = Report::new(title);
    for c in checks {
        r.push(c);
    }
    r
}

// ---- check-axioms ----

fn axioms(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let seed = cfg.seed;
    let mut b = Builder::new("check-axioms", opts);
    let mut rings = Vec::new();
    for (x, rc) in cfg.axioms.rings.iter().enumerate() {
        rings.push(rc.build(&format!("axioms.rings[{x}]")).map_err(Error::Config)?);
    }
    for k in &rings {
        let name = k.kind().to_string();
        b.section(&format!("axioms over {name}"), |_| {
            let u = UniversalStructure::new(k);
            let mut r = Report::new("");
            r.extend(verify_qs(&u, seed));
            r.extend(verify_qr(&u, seed));
            r.extend(verify_qa(&AlgebraBinding::new(&u, &u), seed));
            r.extend(verify_heis(k));
            Ok(r)
        })?;
        b.order(format!("universal structure over {name}"), UniversalStructure::new(k).order());
    }
    b.section("seeded defects", |notes| {
        let mut checks = Vec::new();
        let mut detect = |label: &str, run: &dyn Fn(&Ring) -> Report| {
            let mut c = Check::new(format!("{label} is detected"));
            let mut hits = Vec::new();
            let mut witness = None;
            for k in &rings {
                let r = run(k);
                let found = r.failures().find(|f| f.witness.is_some()).map(|f| (f.name.clone(), f.witness.clone().unwrap_or_default()));
                if let Some((name, w)) = found {
                    hits.push(k.kind().to_string());
                    witness.get_or_insert_with(|| format!("over {}: {name} failed, {w}", k.kind()));
                }
            }
            c.case(witness.is_some(), || "no suite failed on any ring".into());
            if let Some(w) = witness {
                notes.push(format!("{label}: {w}"));
            }
            checks.push(c.with_note(format!("caught over {}", if hits.is_empty() { "no ring".into() } else { hits.join(", ") })));
        };
        detect("zero trace (universal)", &|k| verify_qs(&UniversalStructure::with_mutation(k, StructureMutation::ZeroTrace), seed));
        detect("zero trace (Bak)", &|k| verify_qs(&BakStructure::with_mutation(k, StructureMutation::ZeroTrace), seed));
        detect("zero multiplication", &|k| verify_qr(&UniversalStructure::with_mutation(k, StructureMutation::ZeroMul), seed));
        detect("action ignored", &|k| {
            let u = UniversalStructure::new(k);
            verify_qa(&AlgebraBinding::new(&u, &u).with_mutation(ActionMutation::IgnoreAction), seed)
        });
        Ok(from_checks("", checks))
    })?;
    let (pairs, bound) = (cfg.axioms.poly_pairs, cfg.axioms.poly_bound as i128);
    b.section("Heisenberg ring image", |_| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut add = Check::new("additive");
        let mut mul = Check::new("multiplicative");
        for _ in 0..pairs {
            let mut draw = || HeisZ { x: rng.gen_range(-bound..=bound), y: rng.gen_range(-bound..=bound) };
            let (h, h2) = (draw(), draw());
            let r = heis_poly_check(h, h2)?;
            add.case(r.additive, || format!("{h:?}, {h2:?}"));
            mul.case(r.multiplicative, || format!("{h:?}, {h2:?}"));
        }
        let note = format!("{pairs} random pairs with |x|, |y| <= {bound}");
        Ok(from_checks("", vec![add.with_note(note.clone()), mul.with_note(note)]))
    })?;
    Ok(b.finish())
}

// ---- relations ----

fn relations(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let (seed, rc) = (cfg.seed, &cfg.relations);
    let mut b = Builder::new("relations", opts);
    let ctx = EndoContext::new(&prep.space)?;
    b.section("space", |_| Ok(verify_space(&prep.space, seed)))?;
    b.section("adjoint", |_| Ok(verify_adjoint(&ctx, seed, rc.trials)))?;
    b.section("NQ", |_| Ok(verify_nq(&ctx, seed, rc.trials)))?;
    b.section("LT", |notes| {
        if ctx.l() < 2 {
            notes.push("LT needs two hyperbolic indices; l = 1".into());
        }
        Ok(verify_lt(&ctx, seed, rc.budget))
    })?;
    b.section("T", |notes| {
        if ctx.l() < 2 {
            notes.push("T needs two hyperbolic indices; l = 1".into());
        }
        Ok(verify_t(&ctx, seed, rc.budget))
    })?;
    let ls = LevelSpace::new(&ctx)?;
    b.section("Lambda", |_| Ok(verify_lambda(&ls)))?;
    if rc.chevalley {
        let l0 = ls.l0()?;
        b.section("Chevalley at L0", |_| ls.verify_chevalley(&l0, seed, rc.budget, prep.cap))?;
    }
    if rc.mutations {
        b.section("seeded defects", |notes| mutation_fixtures(seed, notes))?;
    }
    Ok(b.finish())
}

/// Fixed small spaces on which each seeded defect of the relation calculus
/// must be caught.
fn mutation_fixtures(seed: u64, notes: &mut Vec<String>) -> Result<Report> {
    let z4 = Ring::new(&RingSpec::modular(4, 1))?;
    let s4 = build_standard_space(&z4, &BlockProfile::simple(2, 1), &Mat::identity(1), &ParamChoice::Minimal, DEFAULT_PARAM_CAP)?;
    let f3 = Ring::new(&RingSpec::modular(3, 1))?;
    let s3 = build_standard_space(&f3, &BlockProfile::simple(2, 1), &Mat::scalar(1, f3.from_int(2)), &ParamChoice::Minimal, DEFAULT_PARAM_CAP)?;
    let mut checks = Vec::new();
    let cases: [(&str, EndoMutation, &crate::forms::QuadraticSpace, bool); 4] = [
        ("adjoint without the form (T)", EndoMutation::NaiveAdjoint, &s3, true),
        ("sign of pi (NQ)", EndoMutation::PiSign, &s4, false),
        ("sign in the group law of H (NQ)", EndoMutation::HAddSign, &s4, false),
        ("phi dropped (NQ)", EndoMutation::ZeroPhi, &s4, false),
    ];
    for (label, m, space, use_t) in cases {
        let ctx = EndoContext::with_mutation(space, m)?;
        let r = if use_t { verify_t(&ctx, seed, 64) } else { verify_nq(&ctx, seed, 200) };
        let failed: Vec<String> = r.failures().map(|f| f.name.clone()).collect();
        let first = r.failures().find(|f| f.witness.is_some()).map(|f| format!("{} failed: {}", f.name, f.witness.clone().unwrap_or_default()));
        if let Some(w) = &first {
            notes.push(format!("{label}: {w}"));
        }
        let c = Check::single(format!("{label} is detected"), first.is_some(), || "every check passed on the defective context".into());
        checks.push(c.with_note(format!("failing: {}", failed.join(", "))));
    }
    // The same suites on the undamaged contexts, so that a detection above
    // is attributable to the defect.
    let clean_nq = verify_nq(&EndoContext::new(&s4)?, seed, 200);
    let clean_t = verify_t(&EndoContext::new(&s3)?, seed, 64);
    checks.push(Check::single("undamaged fixtures pass", clean_nq.all_passed() && clean_t.all_passed(), || {
        clean_nq.failures().chain(clean_t.failures()).map(|f| f.name.clone()).collect::<Vec<_>>().join(", ")
    }));
    Ok(from_checks("", checks))
}

// ---- lambda ----

fn lambda(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let mut b = Builder::new("lambda", opts);
    let ls = level_space(prep)?;
    b.section("Lambda lemma", |_| Ok(verify_lambda(&ls)))?;
    for (i, els) in &ls.lambda.blocks {
        b.order(format!("Lambda_{i}"), els.len());
    }
    b.order("Lambda", ls.lambda.group.order());
    Ok(b.finish())
}

// ---- level ----

fn eval_levels(ls: &LevelSpace, exprs: &[(String, super::LevelExpr)]) -> Result<Vec<(String, AugLevel)>> {
    exprs.iter().map(|(n, e)| Ok((n.clone(), e.eval(ls)?))).collect()
}

fn level(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let mut b = Builder::new("level", opts);
    let ls = level_space(prep)?;
    let c = &ls.ctx;
    let lg = LevelGroups::new(&ls, prep.cap);
    let mut classes: Vec<AugLevel> = Vec::new();
    for (name, lvl) in eval_levels(&ls, &prep.levels)? {
        if !classes.iter().any(|x| ls.same_class(x, &lvl)) {
            classes.push(lvl.clone());
        }
        b.section(&format!("level {name}"), |notes| {
            let mut r = Report::new("");
            r.extend(ls.check_aug_level(&lvl));
            let fl = ls.floor(&lvl)?;
            r.push(Check::single("floor is a level of the same class below L", ls.is_aug_level(&fl) && ls.same_class(&fl, &lvl) && ls.contained(&fl, &lvl), || "floor".into()));
            let (m, g) = ls.floor_formula(&lvl)?;
            let fm = fl.i.restrict(|i, j| i == 0 && j == 0) == m && fl.gamma.act(c, &c.diag(c.e(0))).equal(c, &g);
            r.push(Check::single("floor matches the closed formula", fm, || "e_0 parts differ".into()));
            match ls.ceil(&lvl) {
                Ok(ce) => r.push(Check::single("ceiling is a level of the same class above L", ls.is_aug_level(&ce) && ls.same_class(&ce, &lvl) && ls.contained(&lvl, &ce), || "ceiling".into())),
                Err(Error::CarrierTooLarge(m)) => notes.push(format!("ceiling skipped: {m}")),
                Err(e) => return Err(e),
            }
            let hat = ls.enveloping(&lvl)?;
            let hat2 = ls.enveloping(&hat)?;
            r.push(Check::single("enveloping level contains L and is idempotent", ls.class_contained(&lvl, &hat) && ls.same_class(&hat, &hat2), || "enveloping".into()));
            let k = c.ring();
            r.push(Check::single("L . 1 = L", ls.same_aug(&ls.scale(&lvl, k.one()), &lvl), || "scale by one".into()));
            let z = ls.scale(&lvl, k.zero());
            r.push(Check::single("L . 0 = 0", z.i.order() == BigUint::from(1u8) && z.gamma.order() == BigUint::from(1u8), || "scale by zero".into()));
            if cfg.levels.round_trip {
                match lg.eu_level(&lvl) {
                    Ok(e) => {
                        let back = ls.level_of_group(&|g: &Mat| e.contains(g))?;
                        r.push(Check::single("level of EU(P, L) has the class of L", ls.same_class(&back, &lvl), || format!("recovered {:?}", ls.summary(&back))));
                        notes.push(format!("|EU(P, L)| = {}", e.order()));
                    }
                    Err(Error::CapExceeded { what, cap }) => notes.push(format!("round trip skipped: {what} would exceed {cap} elements")),
                    Err(e) => return Err(e),
                }
            }
            Ok(r)
        })?;
        b.order(format!("I of {name}"), lvl.i.order());
        b.order(format!("Gamma of {name}"), lvl.gamma.order());
        b.dump(&name, &ls, &lvl);
    }
    b.order("distinct level classes", classes.len());
    Ok(b.finish())
}

// ---- groups ----

fn groups(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let gc = &cfg.groups;
    let mut b = Builder::new("groups", opts);
    let ls = level_space(prep)?;
    let lg = LevelGroups::new(&ls, prep.cap);
    let eu_gens = lg.eu_gens()?;
    let eu = lg.eu()?;
    b.order("EU(P)", eu.order());
    let up = if gc.unitary {
        let up = lg.unitary(cfg.seed)?;
        b.order("U(P)", up.order());
        b.section("U(P)", |_| {
            Ok(from_checks(
                "",
                vec![
                    Check::single("EU(P) <= U(P)", eu.is_subgroup_of(&up), || "EU(P) not inside U(P)".into()),
                    Check::single("EU(P) is normal in U(P)", eu.is_normalized_by(up.generators()), || "a generator of U(P) moves EU(P)".into()),
                ],
            ))
        })?;
        Some(up)
    } else {
        None
    };
    for (name, lvl) in eval_levels(&ls, &prep.levels)? {
        let e = match lg.eu_level(&lvl) {
            Ok(e) => e,
            Err(Error::CapExceeded { what, cap }) => {
                b.section(&format!("groups at {name}"), |notes| {
                    notes.push(format!("skipped: {what} would exceed {cap} elements"));
                    Ok(Report::new(""))
                })?;
                continue;
            }
            Err(e) => return Err(e),
        };
        b.order(format!("EU(P, {name})"), e.order());
        let mut perf_order = None;
        let mut bnd_order = None;
        b.section(&format!("groups at {name}"), |_| {
            let mut checks = vec![Check::single("EU(P, L) is normalized by EU(P)", e.is_normalized_by(&eu_gens), || "not normal".into())];
            if gc.perfection {
                let p = lg.perfection_group(&lvl)?;
                perf_order = Some(p.order());
                checks.push(Check::single("[EU(P, L), EU(P)] = EU(P, L)", p.equal(&e), || format!("orders {} and {}", p.order(), e.order())));
            }
            if gc.boundary {
                let bg = lg.boundary_group(&lvl)?;
                bnd_order = Some(bg.order());
                checks.push(Check::single("boundary root subgroups generate EU(P, L) normally", bg.equal(&e), || format!("orders {} and {}", bg.order(), e.order())));
            }
            // U(P, L) is cut out of GL(P) by its two conditions, so the
            // inclusion is tested elementwise rather than inside U(P).
            let mut low = Check::new("EU(P, L) <= U(P, L)");
            for g in e.elements() {
                low.case(ls.principal_member(&lvl, &g), || format!("{:?}", g.show(ls.ctx.ring())));
            }
            checks.push(low);
            if let Some(up) = &up {
                let pr = lg.principal(&lvl, up, cfg.seed)?;
                let inside = e.is_subgroup_of(up);
                let c = Check::single("U(P, L) meets U(P) in a normal subgroup of U(P)", pr.is_normalized_by(up.generators()), || "not normal".into());
                checks.push(c.with_note(format!("|U(P, L) meet U(P)| = {}; EU(P, L) {} U(P)", pr.order(), if inside { "lies in" } else { "is not contained in" })));
            }
            Ok(from_checks("", checks))
        })?;
        if let Some(o) = perf_order {
            b.order(format!("[EU(P, {name}), EU(P)]"), o);
        }
        if let Some(o) = bnd_order {
            b.order(format!("boundary group at {name}"), o);
        }
    }
    Ok(b.finish())
}

// ---- sandwich ----

fn sandwich(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    if prep.space.profile().l <= 3 {
        sandwich_exhaustive(prep, opts)
    } else {
        sandwich_sampled(prep, opts)
    }
}

fn random_element(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Mat {
    let keys = g.keys();
    g.codec().decode(keys[rng.gen_range(0..keys.len())])
}

fn sandwich_exhaustive(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let sc = &cfg.sandwich;
    let mut b = Builder::new("sandwich", opts);
    b.rep.header.push("exhaustive tier: every element of every group is tested; the l >= 4 hypothesis of the sandwich theorem is not met, so this records empirical status only".into());
    let ls = level_space(prep)?;
    let c = &ls.ctx;
    let lg = LevelGroups::new(&ls, prep.cap);
    let eu_gens = lg.eu_gens()?;
    let eu = lg.eu()?;
    let up = lg.unitary(cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut family: Vec<(String, FiniteGroup)> = vec![("EU(P)".into(), eu.clone()), ("U(P)".into(), up.clone())];
    for x in 0..sc.random_closures {
        let g = random_element(&up, &mut rng);
        family.push((format!("normal closure {}", x + 1), FiniteGroup::normal_closure(c.ring(), c.dim(), &[g], &eu_gens, prep.cap)?));
    }
    for (name, lvl) in eval_levels(&ls, &prep.principal_levels)? {
        family.push((format!("U(P, {name})"), lg.principal(&lvl, &up, cfg.seed)?));
    }
    // Random closures often coincide with EU(P) or U(P) as sets. Such a
    // group has the same level and the same test points, so its verdict
    // is carried over instead of recomputed.
    let mut done: Vec<(usize, Report)> = Vec::new();
    for (x, (name, g)) in family.iter().enumerate() {
        b.order(name.clone(), g.order());
        let lvl = ls.level_of_group(&|m: &Mat| g.contains(m))?;
        if let Some((y, rep)) = done.iter().find(|(y, _)| family[*y].1.equal(g)) {
            let same = &family[*y].0;
            b.section(&format!("sandwich for {name}"), |notes| {
                notes.push(format!("equal to {same} as a set; verdict carried over"));
                Ok(rep.clone())
            })?;
            b.dump(&format!("L({name})"), &ls, &lvl);
            continue;
        }
        let floor = ls.floor(&lvl)?;
        let e = lg.eu_level(&lvl)?;
        b.order(format!("EU(P, L({name}))"), e.order());
        let mut out = Report::new("");
        b.section(&format!("sandwich for {name}"), |notes| {
            let mut low = Check::new("EU(P, L(G)) <= G");
            let codec = e.codec();
            for &k in e.keys() {
                low.case(g.contains_key(k), || format!("{:?}", codec.decode(k).show(c.ring())));
            }
            let oracle = GuOracle::new(&ls, &floor, sc.gu_samples, sc.pairwise, cfg.seed)?;
            let mut up_check = Check::new("G <= GU'(P, floor L(G))");
            for m in g.elements() {
                let v = oracle.violation(&m);
                up_check.case(v.is_none(), || format!("{}: {:?}", v.clone().unwrap_or_default(), m.show(c.ring())));
            }
            notes.push(format!("{} test points per sign of g", oracle.size()));
            out = from_checks("", vec![low, up_check.with_note("every element of G")]);
            Ok(out.clone())
        })?;
        done.push((x, out));
        b.dump(&format!("L({name})"), &ls, &lvl);
    }
    Ok(b.finish())
}

/// Simple unitary elements beyond the elementary generators: the swaps
/// `e_i <-> e_{-i}` and the diagonal scalings, whenever they are isometries.
fn extra_unitaries(ls: &LevelSpace) -> Vec<Mat> {
    let c = &ls.ctx;
    let k = c.ring();
    let p = c.profile();
    let d = c.dim();
    let mut out = Vec::new();
    for i in 1..=ls.l() {
        let (a, bpos) = (p.range(i).start, p.range(-i).start);
        let mut s = Mat::identity(d);
        s.set(a, a, k.zero());
        s.set(bpos, bpos, k.zero());
        s.set(a, bpos, k.one());
        s.set(bpos, a, k.one());
        out.push(s);
        for u in k.units() {
            let Some(ui) = k.inv(k.conj(u)) else { continue };
            let mut g = Mat::identity(d);
            g.set(a, a, u);
            g.set(bpos, bpos, ui);
            out.push(g);
        }
    }
    out.retain(|g| c.space.is_isometry_unchecked(g) && !g.is_identity());
    out
}

fn sandwich_sampled(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let sc = &cfg.sandwich;
    let mut b = Builder::new("sandwich", opts);
    b.rep.header.push(format!(
        "sampled tier: the groups are not enumerated; lower inclusions are checked on generators and upper inclusions on {} random words of length {}; this is evidence, not proof",
        sc.words, sc.word_length
    ));
    let ls = level_space(prep)?;
    let c = &ls.ctx;
    let k = c.ring();
    let lg = LevelGroups::new(&ls, prep.cap);
    let eu_gens = lg.eu_gens()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Candidate elements of U(P): elementary generators, the extra
    // unitaries, and short random words in both.
    let mut pool = eu_gens.clone();
    pool.extend(extra_unitaries(&ls));
    let base = pool.clone();
    for _ in 0..4 * base.len() {
        let mut w = Mat::identity(c.dim());
        for _ in 0..rng.gen_range(2..=6) {
            w = w.mul(k, &base[rng.gen_range(0..base.len())]);
        }
        pool.push(w);
    }
    for (x, (name, lp)) in eval_levels(&ls, &prep.sampled_levels)?.into_iter().enumerate() {
        let member = |g: &Mat| ls.principal_member(&lp, g);
        let lvl = ls.level_of_group(&member)?;
        let floor = ls.floor(&lvl)?;
        let eul = lg.eul_gens(&lvl)?;
        let mut gens: Vec<Mat> = eul.clone();
        gens.extend(pool.iter().filter(|g| member(g)).cloned());
        b.order(format!("generators of U(P, {name}) used"), gens.len());
        b.section(&format!("sandwich for U(P, {name})"), |notes| {
            let mut low = Check::new("generators of EU(P, L(G)) lie in U(P, L')");
            for g in &eul {
                low.case(member(g), || format!("{:?}", g.show(k)));
                for y in &eu_gens {
                    let yi = y.inverse(k).ok_or(Error::NotInvertible)?;
                    let conj = yi.mul(k, g).mul(k, y);
                    low.case(member(&conj), || format!("conjugate {:?}", conj.show(k)));
                }
            }
            let oracle = GuOracle::new(&ls, &floor, sc.gu_samples, sc.pairwise, cfg.seed.wrapping_add(x as u64))?;
            let mut up_check = Check::new("sampled words of G lie in GU'(P, floor L(G))");
            let mut inside = Check::new("sampled words of G lie in U(P, L')");
            if gens.is_empty() {
                notes.push("no candidate element lies in G, so every sampled word is the identity".into());
            }
            for _ in 0..sc.words {
                let mut w = Mat::identity(c.dim());
                for _ in 0..if gens.is_empty() { 0 } else { sc.word_length } {
                    w = w.mul(k, &gens[rng.gen_range(0..gens.len())]);
                }
                inside.case(member(&w), || format!("{:?}", w.show(k)));
                let v = oracle.violation(&w);
                up_check.case(v.is_none(), || format!("{}: {:?}", v.clone().unwrap_or_default(), w.show(k)));
            }
            notes.push(format!("{} generators, {} test points per sign", gens.len(), oracle.size()));
            Ok(from_checks("", vec![low, inside, up_check.with_note("sampled evidence, not proof")]))
        })?;
        b.dump(&format!("L'({name})"), &ls, &lp);
        b.dump(&format!("L(U(P, {name}))"), &ls, &lvl);
    }
    Ok(b.finish())
}

// ---- classical ----

fn classical(prep: &Prepared, opts: &HarnessOptions) -> Result<CampaignReport> {
    let cfg = &prep.config;
    let cc = &cfg.classical;
    let cap = prep.cap;
    let mut b = Builder::new("classical", opts);
    let p = cc.field;
    let l = cc.l;
    let mut found: Vec<(String, String, usize)> = Vec::new();
    b.section(&format!("identification over F{p}, l = {l}"), |notes| {
        let mut checks = Vec::new();
        for (lam, lam_name) in [(1i64, "1"), (-1, "-1")] {
            let k = Ring::new(&RingSpec::modular(p, (lam.rem_euclid(p as i64)) as u32))?;
            for (param, pname) in [(ParamChoice::Minimal, "minimal"), (ParamChoice::Maximal, "maximal")] {
                let id = identify(&k, l, &param, cap)?;
                let label = format!("lambda = {lam_name}, {pname} L");
                let verdict = match id.verdict() {
                    "O" => format!("U(P) = O({}, F{p})", 2 * l),
                    "Sp" => format!("U(P) = Sp({}, F{p})", 2 * l),
                    v => v.to_string(),
                };
                notes.push(format!("{label}: {verdict}"));
                found.push((format!("U(P) at {label}"), verdict.clone(), id.unitary_order));
                found.push((format!("O({}, F{p})", 2 * l), String::new(), id.orthogonal_order));
                found.push((format!("Sp({}, F{p})", 2 * l), String::new(), id.symplectic_order));
                let ok = id.is_orthogonal || id.is_symplectic;
                checks.push(Check::single(format!("{label}: U(P) equals a textbook group"), ok, || format!("|U(P)| = {}, |O| = {}, |Sp| = {}", id.unitary_order, id.orthogonal_order, id.symplectic_order)).with_note(verdict));
            }
        }
        Ok(from_checks("", checks))
    })?;
    for (name, _, o) in &found {
        if b.rep.order(name).is_none() {
            b.order(name.clone(), o);
        }
    }

    let f2 = Ring::new(&RingSpec::modular(2, 1))?;
    b.section(&format!("odd orthogonal space over F2, l = {l}"), |notes| {
        let oc = check_odd_orthogonal(&f2, l, cap)?;
        let s = odd_orthogonal_space(&f2, l)?;
        let ls = LevelSpace::new(&EndoContext::new(&s)?)?;
        let lambda_zero = ls.lambda.blocks.iter().all(|(_, els)| els.len() == 1 && ls.ctx.h_is_zero(&els[0]));
        notes.push(format!("|U(P)| = {}, |O(Q_hyp)| = {}", oc.unitary_order, oc.stabilizer_order));
        Ok(from_checks(
            "",
            vec![
                Check::single("every g in U(P) fixes e_0", oc.moving_e0.is_empty(), || oc.moving_e0.join("; ")),
                Check::single("every g in U(P) is orthogonal on the hyperbolic part", oc.not_orthogonal.is_empty(), || oc.not_orthogonal.join("; ")),
                Check::single("every 1 (+) h with h in O(Q_hyp) lies in U(P)", oc.missing.is_empty(), || oc.missing.join("; ")),
                Check::single("|U(P)| = |O(Q_hyp)|", oc.unitary_order == oc.stabilizer_order, || format!("{} vs {}", oc.unitary_order, oc.stabilizer_order)),
                Check::single("Lambda_i = 0", lambda_zero, || format!("{:?}", ls.lambda.blocks.iter().map(|(i, e)| (i, e.len())).collect::<Vec<_>>())),
            ],
        ))
    })?;

    for &n in &cc.between_moduli {
        let k = Ring::new(&RingSpec::modular(n, 1))?;
        let s = odd_orthogonal_space(&k, l)?;
        let ls = LevelSpace::new(&EndoContext::new(&s)?)?;
        let l0 = ls.l0()?;
        let l1 = l1_level(&ls)?;
        let mut count = 0;
        b.section(&format!("levels between L0 and L1 over Z/{n}"), |notes| {
            let eo = FiniteGroup::generate(&k, s.dim(), &eo_odd_generators(&ls)?, cap)?;
            notes.push(format!("|EO({}, Z/{n})| = {}", 2 * l + 1, eo.order()));
            let from_group = ls.level_of_group(&|g: &Mat| eo.contains(g))?;
            let mut checks = vec![
                Check::single("L1 is the level of EO(2l + 1)", ls.same_class(&l1, &from_group), || format!("{:?}", ls.summary(&from_group))),
                Check::single("L1 is a level containing L0", ls.is_aug_level(&l1) && ls.class_contained(&l0, &l1), || "L1".into()),
            ];
            let between = levels_between(&ls, &l0, &l1, 4096)?;
            count = between.len();
            let ideals = ideal_count(&k);
            let mut each = Check::new("each level lies between L0 and L1 and has a = b");
            let mut seen = Vec::new();
            for lvl in &between {
                let (a, bb) = between_data(&ls, lvl);
                each.case(ls.is_aug_level(lvl) && ls.class_contained(&l0, lvl) && ls.class_contained(lvl, &l1) && a == bb, || {
                    format!("a = {}, b = {}", show_ideal(&k, &a), show_ideal(&k, &bb))
                });
                notes.push(format!("a = b = {}", show_ideal(&k, &a)));
                seen.push(a);
            }
            seen.sort();
            seen.dedup();
            checks.push(each);
            checks.push(Check::single("distinct levels have distinct ideals", seen.len() == between.len(), || format!("{} levels, {} ideals", between.len(), seen.len())));
            checks.push(Check::single("number of levels = number of ideals of K", between.len() == ideals, || format!("{} levels, {ideals} ideals", between.len())));
            Ok(from_checks("", checks))
        })?;
        b.order(format!("levels between L0 and L1 over Z/{n}"), count);
    }

    for &n in &cc.above_moduli {
        let k = Ring::new(&RingSpec::modular(n, 1))?;
        let s = odd_orthogonal_space(&k, l)?;
        let ls = LevelSpace::new(&EndoContext::new(&s)?)?;
        let l1 = l1_level(&ls)?;
        let mut count = 0;
        b.section(&format!("levels above L1 over Z/{n}"), |notes| {
            let above = levels_above(&ls, &l1, 4096)?;
            count = above.len();
            let mut per: Vec<Check> = Vec::new();
            let mut datas: Vec<AboveData> = Vec::new();
            let mut valid = Check::new("each is a level containing L1");
            for lvl in &above {
                valid.case(ls.is_aug_level(lvl) && ls.class_contained(&l1, lvl), || format!("{:?}", ls.summary(lvl)));
                let d = above_data(&ls, lvl)?;
                for (name, ok, wit) in above_constraints(&k, &d) {
                    match per.iter_mut().find(|c| c.name == name) {
                        Some(c) => c.case(ok, || wit.clone()),
                        None => per.push(Check::single(name, ok, || wit.clone())),
                    }
                }
                notes.push(format!("a = {}, b = {}, |W| = {}", show_ideal(&k, &d.a), show_ideal(&k, &d.b), d.w.len()));
                datas.push(d);
            }
            let mut distinct = datas.clone();
            distinct.sort();
            distinct.dedup();
            let mut checks = vec![valid];
            checks.extend(per);
            checks.push(Check::single("(a, b, W) determines the level", distinct.len() == datas.len(), || format!("{} levels, {} data", datas.len(), distinct.len())));
            Ok(from_checks("", checks))
        })?;
        b.order(format!("levels above L1 found over Z/{n}"), count);
    }
    Ok(b.finish())
}
