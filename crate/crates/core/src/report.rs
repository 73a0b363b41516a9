//! JSON run report.
//!
//! Keys appear in struct declaration order, so identical runs serialize to
//! identical bytes. `schema_version` is bumped on any incompatible change.

use serde::{Deserialize, Serialize};

use crate::engine::{EngineParams, LineageTree, RunPlan, TherapyRecord};
use crate::ops::{MutationEvent, MutationKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub params: EngineParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<RunPlan>,
    pub lineage: Vec<LineageEntry>,
    pub events: Vec<MutationEvent>,
    pub therapy: Option<TherapyRecord>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageEntry {
    pub part_id: String,
    pub parent: Option<String>,
    pub spawn_measure: usize,
    pub offset: usize,
    pub born_in_cycle: u32,
    pub offspring_count: u32,
    pub alive: bool,
    pub death_measure: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub insertion: usize,
    pub deletion: usize,
    pub inversion: usize,
    pub translocation: usize,
    pub transposition: usize,
}

impl KindCounts {
    fn bump(&mut self, kind: MutationKind) {
        match kind {
            MutationKind::Insertion => self.insertion += 1,
            MutationKind::Deletion => self.deletion += 1,
            MutationKind::Inversion => self.inversion += 1,
            MutationKind::Translocation => self.translocation += 1,
            MutationKind::Transposition => self.transposition += 1,
        }
    }

    pub fn get(&self, kind: MutationKind) -> usize {
        match kind {
            MutationKind::Insertion => self.insertion,
            MutationKind::Deletion => self.deletion,
            MutationKind::Inversion => self.inversion,
            MutationKind::Translocation => self.translocation,
            MutationKind::Transposition => self.transposition,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub events_total: usize,
    /// Includes skipped applications.
    pub events_by_kind: KindCounts,
    pub skipped_events: usize,
    pub parts_total: usize,
    pub spawned_parts: usize,
    pub live_parts: usize,
    pub dead_parts: usize,
    pub killed_by_therapy: usize,
}

impl Summary {
    pub fn recompute(
        lineage: &[LineageEntry],
        events: &[MutationEvent],
        therapy: Option<&TherapyRecord>,
    ) -> Summary {
        let mut by_kind = KindCounts::default();
        for e in events {
            by_kind.bump(e.kind);
        }
        let live = lineage.iter().filter(|n| n.alive).count();
        Summary {
            events_total: events.len(),
            events_by_kind: by_kind,
            skipped_events: events.iter().filter(|e| e.detail.is_skipped()).count(),
            parts_total: lineage.len(),
            spawned_parts: lineage.iter().filter(|n| n.parent.is_some()).count(),
            live_parts: live,
            dead_parts: lineage.len() - live,
            killed_by_therapy: therapy.map_or(0, |t| t.killed.len()),
        }
    }
}

impl RunReport {
    pub fn new(tree: &LineageTree, params: &EngineParams) -> Self {
        let lineage: Vec<LineageEntry> = tree
            .nodes
            .iter()
            .map(|n| LineageEntry {
                part_id: n.part_id.clone(),
                parent: n.parent.clone(),
                spawn_measure: n.spawn_measure,
                offset: n.offset,
                born_in_cycle: n.born_in_cycle,
                offspring_count: n.offspring_count,
                alive: n.alive,
                death_measure: n.death_measure,
            })
            .collect();
        let summary = Summary::recompute(&lineage, &tree.events, tree.therapy.as_ref());
        RunReport {
            schema_version: SCHEMA_VERSION,
            params: params.clone(),
            plan: None,
            lineage,
            events: tree.events.clone(),
            therapy: tree.therapy.clone(),
            summary,
        }
    }

    pub fn with_plan(mut self, plan: RunPlan) -> Self {
        self.plan = Some(plan);
        self
    }

    /// True when the embedded summary matches a recount of the arrays.
    pub fn is_consistent(&self) -> bool {
        self.summary == Summary::recompute(&self.lineage, &self.events, self.therapy.as_ref())
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

/// Serializes the lineage of a run together with the parameters that produced it.
pub fn emit_report(tree: &LineageTree, params: &EngineParams) -> Vec<u8> {
    RunReport::new(tree, params).to_json()
}
