//! Experiment configuration, parsed from TOML and validated into the
//! ring, space and level constructors that campaigns run on.

use serde::{Deserialize, Serialize};

use super::expr::LevelExpr;
use crate::error::{Error, Result};
use crate::forms::{build_standard_space, BlockProfile, HeisVec, ParamChoice, QuadraticSpace, DEFAULT_PARAM_CAP};
use crate::groups::DEFAULT_GROUP_CAP;
use crate::matrix::Mat;
use crate::ring::{Elem, Ring, RingKind, RingSpec};

pub const CAMPAIGNS: [&str; 7] = ["check-axioms", "relations", "lambda", "level", "groups", "sandwich", "classical"];

/// A ring element in a config: an integer (its image under `Z -> K`) or
/// an explicit list of residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Residues(Vec<u32>),
}

impl Entry {
    pub fn to_elem(&self, k: &Ring) -> Result<Elem> {
        match self {
            Entry::Int(x) => Ok(k.from_int(*x)),
            Entry::Residues(r) => k.from_residues(r),
        }
    }
}

/// `lambda = 1` or `lambda = [1, 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaEntry {
    Int(i64),
    Residues(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    /// `modular`, `swap_product` or `quad_ext`.
    pub kind: String,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    pub lambda: LambdaEntry,
}

impl RingConfig {
    pub fn modular(n: u32, lambda: i64) -> RingConfig {
        RingConfig { kind: "modular".into(), n, d: None, lambda: LambdaEntry::Int(lambda) }
    }

    pub fn swap_product(n: u32, lambda: [u32; 2]) -> RingConfig {
        RingConfig { kind: "swap_product".into(), n, d: None, lambda: LambdaEntry::Residues(lambda.to_vec()) }
    }

    /// The ring, with errors prefixed by the offending field under `path`.
    pub fn build(&self, path: &str) -> std::result::Result<Ring, String> {
        let kind = match self.kind.as_str() {
            "modular" => RingKind::Modular { n: self.n },
            "swap_product" => RingKind::SwapProduct { n: self.n },
            "quad_ext" => match self.d {
                Some(d) => RingKind::QuadExt { n: self.n, d },
                None => return Err(format!("{path}.d: quad_ext needs d")),
            },
            other => return Err(format!("{path}.kind: InvalidRing: unknown ring kind '{other}' (expected modular, swap_product or quad_ext)")),
        };
        if self.n < 2 || self.n > 255 {
            return Err(format!("{path}.n: InvalidRing: modulus {} outside 2..=255", self.n));
        }
        let lambda = match &self.lambda {
            LambdaEntry::Residues(r) => r.clone(),
            LambdaEntry::Int(x) => {
                let n = self.n as i64;
                let mut r = vec![x.rem_euclid(n) as u32];
                match kind {
                    RingKind::Modular { .. } => {}
                    // An integer embeds diagonally in Z/n x Z/n and as a + 0t otherwise.
                    RingKind::SwapProduct { .. } => r.push(r[0]),
                    RingKind::QuadExt { .. } => r.push(0),
                }
                r
            }
        };
        Ring::new(&RingSpec { kind, lambda }).map_err(|e| match e {
            Error::InvalidLambda(m) => format!("{path}.lambda: InvalidLambda: {m}"),
            Error::InvalidRing(m) => format!("{path}: InvalidRing: {m}"),
            other => format!("{path}: {other}"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub l: usize,
    /// `(r_0, r_1, ..., r_l)`.
    pub ranks: Vec<usize>,
    /// `minimal`, `maximal` or `generators`.
    pub param: String,
    /// Extra generators of the odd form parameter: `d` entries of `m`
    /// followed by `r`. Only read when `param = "generators"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<Entry>>,
    /// Gram matrix of `P_0`; the identity when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odd_block: Option<Vec<Vec<Entry>>>,
}

fn default_constructors() -> Vec<String> {
    ["zero", "l0", "scale(l0, 0)", "central", "short(1, 2)", "full"].iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    #[serde(default = "default_constructors")]
    pub constructors: Vec<String>,
    /// Recover each level from `EU(P, L)` in the level campaign.
    #[serde(default = "yes")]
    pub round_trip: bool,
}

impl Default for LevelsConfig {
    fn default() -> Self {
        LevelsConfig { constructors: default_constructors(), round_trip: true }
    }
}

fn yes() -> bool {
    true
}

fn default_trials() -> usize {
    10_000
}

fn default_budget() -> usize {
    1 << 12
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationsConfig {
    /// Samples for the suites that sample.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Largest exhaustive block enumeration before switching to samples.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "yes")]
    pub chevalley: bool,
    /// Run the seeded-defect fixtures.
    #[serde(default = "yes")]
    pub mutations: bool,
}

impl Default for RelationsConfig {
    fn default() -> Self {
        RelationsConfig { trials: default_trials(), budget: default_budget(), chevalley: true, mutations: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupsConfig {
    /// Enumerate `U(P)` and the principal groups.
    #[serde(default = "yes")]
    pub unitary: bool,
    #[serde(default = "yes")]
    pub perfection: bool,
    #[serde(default = "yes")]
    pub boundary: bool,
}

impl Default for GroupsConfig {
    fn default() -> Self {
        GroupsConfig { unitary: true, perfection: true, boundary: true }
    }
}

fn default_closures() -> usize {
    3
}

fn default_gu_samples() -> usize {
    16
}

fn default_sampled_levels() -> Vec<String> {
    ["zero", "l0", "ceil(l0)", "central", "full"].iter().map(|s| s.to_string()).collect()
}

fn default_principal_levels() -> Vec<String> {
    vec!["zero".into()]
}

fn default_words() -> usize {
    1000
}

fn default_word_length() -> usize {
    24
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichConfig {
    /// Normal closures of random unitary elements in the exhaustive tier.
    #[serde(default = "default_closures")]
    pub random_closures: usize,
    /// Random sums added to the test points of `GU'` membership.
    #[serde(default = "default_gu_samples")]
    pub gu_samples: usize,
    /// Also test all pairwise sums of generators.
    #[serde(default)]
    pub pairwise: bool,
    /// Levels `L'` whose principal groups `U(P, L')` join the exhaustive family.
    #[serde(default = "default_principal_levels")]
    pub principal_levels: Vec<String>,
    /// Levels `L'` whose principal groups form the sampled tier.
    #[serde(default = "default_sampled_levels")]
    pub sampled_levels: Vec<String>,
    #[serde(default = "default_words")]
    pub words: usize,
    #[serde(default = "default_word_length")]
    pub word_length: usize,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        SandwichConfig {
            random_closures: default_closures(),
            gu_samples: default_gu_samples(),
            pairwise: false,
            principal_levels: default_principal_levels(),
            sampled_levels: default_sampled_levels(),
            words: default_words(),
            word_length: default_word_length(),
        }
    }
}

fn default_field() -> u32 {
    3
}

fn default_classical_l() -> usize {
    2
}

fn default_between() -> Vec<u32> {
    vec![2, 4]
}

fn default_above() -> Vec<u32> {
    vec![4]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    /// Prime field for the orthogonal and symplectic identification.
    #[serde(default = "default_field")]
    pub field: u32,
    #[serde(default = "default_classical_l")]
    pub l: usize,
    /// Moduli `n` for the odd orthogonal space over `Z/n` whose levels
    /// between `L_0` and `L_1` are enumerated.
    #[serde(default = "default_between")]
    pub between_moduli: Vec<u32>,
    /// Moduli for the `(a, b, W)` data of levels above `L_1`.
    #[serde(default = "default_above")]
    pub above_moduli: Vec<u32>,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig { field: default_field(), l: default_classical_l(), between_moduli: default_between(), above_moduli: default_above() }
    }
}

fn default_axiom_rings() -> Vec<RingConfig> {
    vec![RingConfig::modular(2, 1), RingConfig::modular(3, 1), RingConfig::modular(4, 1), RingConfig::swap_product(2, [1, 1])]
}

fn default_poly_pairs() -> usize {
    10_000
}

fn default_poly_bound() -> i64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomsConfig {
    #[serde(default = "default_axiom_rings")]
    pub rings: Vec<RingConfig>,
    #[serde(default = "default_poly_pairs")]
    pub poly_pairs: usize,
    #[serde(default = "default_poly_bound")]
    pub poly_bound: i64,
}

impl Default for AxiomsConfig {
    fn default() -> Self {
        AxiomsConfig { rings: default_axiom_rings(), poly_pairs: default_poly_pairs(), poly_bound: default_poly_bound() }
    }
}

fn default_seed() -> u64 {
    1
}

fn default_campaigns() -> Vec<String> {
    CAMPAIGNS.iter().map(|s| s.to_string()).collect()
}

/// The whole experiment description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Closure cap; the caller's default applies when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Campaigns run by `all`.
    #[serde(default = "default_campaigns")]
    pub campaigns: Vec<String>,
    pub ring: RingConfig,
    pub space: SpaceConfig,
    #[serde(default)]
    pub levels: LevelsConfig,
    #[serde(default)]
    pub relations: RelationsConfig,
    #[serde(default)]
    pub groups: GroupsConfig,
    #[serde(default)]
    pub sandwich: SandwichConfig,
    #[serde(default)]
    pub classical: ClassicalConfig,
    #[serde(default)]
    pub axioms: AxiomsConfig,
}

impl ExperimentConfig {
    /// A config over `Z/n` with the standard profile `(r0, 1, ..., 1)`.
    pub fn standard(n: u32, lambda: i64, l: usize, r0: usize, param: &str) -> ExperimentConfig {
        let mut ranks = vec![1; l + 1];
        ranks[0] = r0;
        ExperimentConfig {
            seed: default_seed(),
            cap: None,
            campaigns: default_campaigns(),
            ring: RingConfig::modular(n, lambda),
            space: SpaceConfig { l, ranks, param: param.into(), generators: vec![], odd_block: None },
            levels: LevelsConfig::default(),
            relations: RelationsConfig::default(),
            groups: GroupsConfig::default(),
            sandwich: SandwichConfig::default(),
            classical: ClassicalConfig::default(),
            axioms: AxiomsConfig::default(),
        }
    }

    pub fn cap_or(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Syntax and shape errors carry the TOML parser's line and column.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {}", e.to_string().trim_end())))
}

pub fn parse_config_file(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = parse_config_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// A validated config: the ring, the space, and parsed level constructors.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub ring: Ring,
    pub space: QuadraticSpace,
    pub levels: Vec<(String, LevelExpr)>,
    pub sampled_levels: Vec<(String, LevelExpr)>,
    pub principal_levels: Vec<(String, LevelExpr)>,
    pub cap: usize,
}

impl ExperimentConfig {
    /// Every semantic check, collecting all field-level errors found.
    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    pub fn prepare(&self) -> Result<Prepared> {
        let mut errs: Vec<String> = Vec::new();
        for c in &self.campaigns {
            if !CAMPAIGNS.contains(&c.as_str()) {
                errs.push(format!("campaigns: unknown campaign '{c}'"));
            }
        }
        let parse_all = |field: &str, exprs: &[String], errs: &mut Vec<String>| -> Vec<(String, LevelExpr)> {
            let mut out = Vec::new();
            for (x, s) in exprs.iter().enumerate() {
                match LevelExpr::parse(s) {
                    Ok(e) => out.push((s.clone(), e)),
                    Err(m) => errs.push(format!("{field}[{x}]: {m}")),
                }
            }
            out
        };
        let levels = parse_all("levels.constructors", &self.levels.constructors, &mut errs);
        let sampled_levels = parse_all("sandwich.sampled_levels", &self.sandwich.sampled_levels, &mut errs);
        let principal_levels = parse_all("sandwich.principal_levels", &self.sandwich.principal_levels, &mut errs);
        let f = self.classical.field;
        if f < 3 || f > 255 || (2..f).any(|x| f % x == 0) {
            errs.push(format!("classical.field: {f} is not an odd prime below 256"));
        }
        for (x, &n) in self.classical.between_moduli.iter().chain(&self.classical.above_moduli).enumerate() {
            if !(2..=255).contains(&n) {
                errs.push(format!("classical moduli[{x}]: {n} outside 2..=255"));
            }
        }
        if self.sandwich.word_length == 0 {
            errs.push("sandwich.word_length: must be positive".into());
        }
        for (x, r) in self.axioms.rings.iter().enumerate() {
            if let Err(m) = r.build(&format!("axioms.rings[{x}]")) {
                errs.push(m);
            }
        }
        if self.cap == Some(0) {
            errs.push("cap: must be positive".into());
        }
        let ring = match self.ring.build("ring") {
            Ok(k) => Some(k),
            Err(m) => {
                errs.push(m);
                None
            }
        };
        let profile = match BlockProfile::new(self.space.l, self.space.ranks.clone()) {
            Ok(p) => Some(p),
            Err(e) => {
                errs.push(format!("space.ranks: {e}"));
                None
            }
        };
        let param_kind = self.space.param.as_str();
        if !["minimal", "maximal", "generators"].contains(&param_kind) {
            errs.push(format!("space.param: unknown parameter choice '{param_kind}' (expected minimal, maximal or generators)"));
        }
        let mut space = None;
        if let (Some(k), Some(p)) = (&ring, &profile) {
            let d = p.dim();
            let r0 = p.ranks[0];
            let odd = match &self.space.odd_block {
                None => Some(Mat::identity(r0)),
                Some(rows) => {
                    if rows.len() != r0 || rows.iter().any(|r| r.len() != r0) {
                        errs.push(format!("space.odd_block: DimensionMismatch: expected a {r0}x{r0} matrix"));
                        None
                    } else {
                        let mut m = Mat::zeros(r0, r0);
                        let mut ok = true;
                        for (i, row) in rows.iter().enumerate() {
                            for (j, e) in row.iter().enumerate() {
                                match e.to_elem(k) {
                                    Ok(v) => m.set(i, j, v),
                                    Err(err) => {
                                        errs.push(format!("space.odd_block[{i}][{j}]: {err}"));
                                        ok = false;
                                    }
                                }
                            }
                        }
                        ok.then_some(m)
                    }
                }
            };
            let mut extra = Vec::new();
            if param_kind == "generators" {
                for (x, g) in self.space.generators.iter().enumerate() {
                    if g.len() != d + 1 {
                        errs.push(format!("space.generators[{x}]: expected {} entries (m then r), got {}", d + 1, g.len()));
                        continue;
                    }
                    match g.iter().map(|e| e.to_elem(k)).collect::<Result<Vec<_>>>() {
                        Ok(v) => extra.push(HeisVec::new(v[..d].to_vec(), v[d])),
                        Err(err) => errs.push(format!("space.generators[{x}]: {err}")),
                    }
                }
            } else if !self.space.generators.is_empty() {
                errs.push("space.generators: only allowed with param = \"generators\"".into());
            }
            if let Some(odd) = odd {
                if errs.is_empty() {
                    let choice = match param_kind {
                        "minimal" => ParamChoice::Minimal,
                        "maximal" => ParamChoice::Maximal,
                        _ => ParamChoice::Generators(extra),
                    };
                    match build_standard_space(k, p, &odd, &choice, DEFAULT_PARAM_CAP) {
                        Ok(s) => space = Some(s),
                        Err(e) => errs.push(match e {
                            Error::NotHermitian(m) => format!("space.odd_block: NotHermitian: {m}"),
                            Error::Degenerate(m) => format!("space.odd_block: Degenerate: {m}"),
                            Error::NotInLMax(m) => format!("space.generators: NotInLMax: {m}"),
                            other => format!("space: {other}"),
                        }),
                    }
                }
            }
        }
        if !errs.is_empty() {
            return Err(Error::Config(errs.join("\n")));
        }
        Ok(Prepared {
            config: self.clone(),
            ring: ring.expect("validated"),
            space: space.expect("validated"),
            levels,
            sampled_levels,
            principal_levels,
            cap: self.cap_or(DEFAULT_GROUP_CAP),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[ring]\nkind = \"modular\"\nn = 2\nlambda = 1\n\n[space]\nl = 3\nranks = [0, 1, 1, 1]\nparam = \"maximal\"\n";

    fn errors(text: &str) -> String {
        match parse_config_str(text).and_then(|c| c.validate()) {
            Err(Error::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_is_valid_with_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        let p = c.prepare().unwrap();
        assert_eq!(p.space.dim(), 6);
        assert_eq!(c.seed, 1);
        assert_eq!(c.campaigns.len(), CAMPAIGNS.len());
        assert_eq!(p.cap, DEFAULT_GROUP_CAP);
        assert_eq!(p.levels.len(), c.levels.constructors.len());
    }

    #[test]
    fn toml_round_trip_preserves_the_config() {
        let mut c = ExperimentConfig::standard(4, 1, 2, 1, "minimal");
        c.cap = Some(1234);
        c.space.odd_block = Some(vec![vec![Entry::Int(3)]]);
        let back = parse_config_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        back.validate().unwrap();
    }

    #[test]
    fn non_unit_lambda_names_the_field() {
        let m = errors(&MINIMAL.replace("n = 2", "n = 4").replace("lambda = 1", "lambda = 2"));
        assert!(m.contains("ring.lambda: InvalidLambda"), "{m}");
    }

    #[test]
    fn missing_ranks_is_a_parse_error_with_position() {
        let m = errors(&MINIMAL.replace("ranks = [0, 1, 1, 1]\n", ""));
        assert!(m.starts_with("parse error"), "{m}");
        assert!(m.contains("ranks"), "{m}");
        assert!(m.contains("line"), "{m}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let m = errors(&format!("{MINIMAL}\n[levels]\nconstrutors = [\"l0\"]\n"));
        assert!(m.contains("construtors"), "{m}");
    }

    #[test]
    fn unknown_ring_kind() {
        let m = errors(&MINIMAL.replace("\"modular\"", "\"padic\""));
        assert!(m.contains("ring.kind: InvalidRing"), "{m}");
    }

    #[test]
    fn non_hermitian_odd_block() {
        let text = "[ring]\nkind = \"modular\"\nn = 3\nlambda = 1\n\n[space]\nl = 2\nranks = [2, 1, 1]\nparam = \"minimal\"\nodd_block = [[1, 1], [2, 1]]\n";
        let m = errors(text);
        assert!(m.contains("space.odd_block: NotHermitian"), "{m}");
        let m = errors(&text.replace("[[1, 1], [2, 1]]", "[[1, 1], [1, 1]]"));
        assert!(m.contains("space.odd_block: Degenerate"), "{m}");
        let m = errors(&text.replace("[[1, 1], [2, 1]]", "[[1]]"));
        assert!(m.contains("DimensionMismatch"), "{m}");
    }

    #[test]
    fn parameter_generator_outside_lmax() {
        let text = "[ring]\nkind = \"modular\"\nn = 3\nlambda = 1\n\n[space]\nl = 1\nranks = [0, 1]\nparam = \"generators\"\ngenerators = [[0, 0, 1]]\n";
        let m = errors(text);
        assert!(m.contains("space.generators: NotInLMax"), "{m}");
        let m = errors(&text.replace("[[0, 0, 1]]", "[[0, 1]]"));
        assert!(m.contains("expected 3 entries"), "{m}");
    }

    #[test]
    fn several_errors_are_reported_at_once() {
        let text = MINIMAL.replace("ranks = [0, 1, 1, 1]", "ranks = [0, 1]").replace("\"maximal\"", "\"medium\"");
        let text = format!("campaigns = [\"relations\", \"dance\"]\ncap = 0\n{text}\n[levels]\nconstructors = [\"l0\", \"scale(l0)\"]\n");
        let m = errors(&text);
        for needle in ["campaigns: unknown campaign 'dance'", "levels.constructors[1]", "cap: must be positive", "space.ranks", "space.param"] {
            assert!(m.contains(needle), "missing {needle} in {m}");
        }
    }

    #[test]
    fn classical_section_is_checked() {
        let m = errors(&format!("{MINIMAL}\n[classical]\nfield = 9\nbetween_moduli = [1]\n"));
        assert!(m.contains("classical.field"), "{m}");
        assert!(m.contains("classical moduli"), "{m}");
    }
}
