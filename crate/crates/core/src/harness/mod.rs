//! End-to-end campaigns driven by an [`ExperimentConfig`], and the report
//! documents they produce.
//!
//! Every campaign is a pure function of the config and its seed. Reports
//! keep insertion order everywhere, so two runs serialize to the same
//! bytes once timings are switched off.

pub mod classical;
mod campaigns;
pub mod config;
pub mod expr;

use std::time::Instant;

use serde::Serialize;

pub use campaigns::run_campaign;
pub use config::{parse_config_file, parse_config_str, ExperimentConfig, Prepared, CAMPAIGNS};
pub use expr::LevelExpr;

use crate::endo::EndoContext;
use crate::levels::{AugLevel, LevelSpace};
use crate::report::{Check, Report};

/// Stated at the top of every report.
pub const TIER_NOTE: &str = "l <= 3: group inclusions are checked exhaustively on enumerated groups; \
l >= 4: groups are too large to enumerate and inclusions are sampled evidence, not proof";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarnessOptions {
    /// Record wall-clock timings per section.
    pub timings: bool,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions { timings: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: &'static str,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            status: if c.passed { "pass" } else { "fail" },
            cases: c.cases,
            witness: c.witness.clone(),
            note: c.note.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderEntry {
    pub name: String,
    pub order: String,
}

/// `I` and `Gamma` of a level, by block orders and generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelDump {
    pub name: String,
    pub i_order: String,
    pub gamma_order: String,
    pub i_block_orders: Vec<String>,
    pub gamma_component_orders: Vec<String>,
    pub i_generators: Vec<String>,
    pub gamma_generators: Vec<String>,
}

impl LevelDump {
    pub fn new(name: &str, space: &LevelSpace, lvl: &AugLevel) -> LevelDump {
        let c = &space.ctx;
        let s = space.summary(lvl);
        LevelDump {
            name: name.to_string(),
            i_order: s.i_order,
            gamma_order: s.gamma_order,
            i_block_orders: s.i_blocks,
            gamma_component_orders: s.gamma_components,
            i_generators: lvl.i.generators(c).iter().map(|a| c.show_a(a)).collect(),
            gamma_generators: lvl.gamma.generators(c).iter().map(|h| c.show_h(h)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignReport {
    pub campaign: String,
    pub status: &'static str,
    pub header: Vec<String>,
    pub sections: Vec<Section>,
    pub orders: Vec<OrderEntry>,
    pub levels: Vec<LevelDump>,
}

impl CampaignReport {
    pub fn new(campaign: &str) -> CampaignReport {
        CampaignReport { campaign: campaign.into(), status: "pass", header: vec![TIER_NOTE.into()], sections: vec![], orders: vec![], levels: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.status == "pass")
    }

    pub fn checks(&self) -> impl Iterator<Item = (&Section, &CheckRecord)> {
        self.sections.iter().flat_map(|s| s.checks.iter().map(move |c| (s, c)))
    }

    /// The check called `name` in the section titled `section`.
    pub fn check(&self, section: &str, name: &str) -> Option<&CheckRecord> {
        self.sections.iter().find(|s| s.title == section)?.checks.iter().find(|c| c.name == name)
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn order(&self, name: &str) -> Option<&str> {
        self.orders.iter().find(|o| o.name == name).map(|o| o.order.as_str())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Section, &CheckRecord)> {
        self.checks().filter(|(_, c)| c.status != "pass")
    }
}

/// Incremental assembly of a campaign report.
pub(crate) struct Builder {
    pub rep: CampaignReport,
    opts: HarnessOptions,
}

impl Builder {
    pub fn new(name: &str, opts: &HarnessOptions) -> Builder {
        Builder { rep: CampaignReport::new(name), opts: *opts }
    }

    /// Runs `f` and records its checks as one section.
    pub fn section(&mut self, title: &str, f: impl FnOnce(&mut Vec<String>) -> crate::Result<Report>) -> crate::Result<()> {
        let t = Instant::now();
        let mut notes = Vec::new();
        let r = f(&mut notes)?;
        let ms = t.elapsed().as_millis() as u64;
        let checks: Vec<CheckRecord> = r.checks.iter().map(CheckRecord::from).collect();
        let status = if checks.iter().all(|c| c.status == "pass") { "pass" } else { "fail" };
        self.rep.sections.push(Section { title: title.into(), status, timing_ms: self.opts.timings.then_some(ms), checks, notes });
        Ok(())
    }

    pub fn order(&mut self, name: impl Into<String>, order: impl ToString) {
        self.rep.orders.push(OrderEntry { name: name.into(), order: order.to_string() });
    }

    pub fn dump(&mut self, name: &str, space: &LevelSpace, lvl: &AugLevel) {
        self.rep.levels.push(LevelDump::new(name, space, lvl));
    }

    pub fn finish(mut self) -> CampaignReport {
        self.rep.status = if self.rep.passed() { "pass" } else { "fail" };
        self.rep
    }
}

/// One run of the tool: config echo plus one report per campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub seed: u64,
    pub status: &'static str,
    pub config: ExperimentConfig,
    pub campaigns: Vec<CampaignReport>,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig, campaigns: Vec<CampaignReport>, timestamp: Option<u64>) -> RunReport {
        let status = if campaigns.iter().all(|c| c.passed()) { "pass" } else { "fail" };
        RunReport { tool: "oddu", version: env!("CARGO_PKG_VERSION"), timestamp, seed: config.seed, status, config: config.clone(), campaigns }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the named campaigns in order.
pub fn run_campaigns(prep: &Prepared, names: &[String], opts: &HarnessOptions) -> crate::Result<Vec<CampaignReport>> {
    names.iter().map(|n| run_campaign(n, prep, opts)).collect()
}

pub(crate) fn level_space(prep: &Prepared) -> crate::Result<LevelSpace> {
    LevelSpace::new(&EndoContext::new(&prep.space)?)
}
