//! The cancer simulation.
//!
//! A run goes through these stages, taking every random decision from one
//! [`DrawStream`] seeded with `params.seed`:
//!
//! 1. [`select_founder`]: draw the founder part (`below(parts)`), then, only
//!    when `cancer_start` is unset, draw it as `unit() * 0.25`. The start
//!    measure is `floor(cancer_start * total_measures)` and the leitmotif is
//!    the founder's next `n` measures.
//! 2. The leitmotif is played from the start measure in cycles of `n`
//!    measures. At every cycle boundary inside the piece, [`step_cycle`] runs
//!    once. For each living part, oldest first: one `unit()` reproduction
//!    trial; if it succeeds, one `below(n)` offset draw for the child; then
//!    the parent's five operator trials; then the child's five trials. An
//!    operator trial is one `chance(p)` and, if it fires, one `below(n)`
//!    measure pick followed by the operator's own draws.
//! 3. With treatment enabled, [`apply_therapy`] runs once when the therapy
//!    measure is reached (after any boundary at or before it): one `chance`
//!    per living part, oldest first.
//! 4. [`render`] turns the lineage into parts.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ops::{
    DonorPool, Leitmotif, MutationDetail, MutationEvent, MutationKind, OperatorContext,
    OperatorRegistry,
};
use crate::rng::DrawStream;
use crate::score::{Measure, Part, Score, ScoreError};

/// Upper bound on living-or-dead cancer parts in one run, founder included.
/// Reproduction stops once it is reached.
pub const MAX_CANCER_PARTS: usize = 64;

/// Upper end of the range an unset cancer start is drawn from.
pub const RANDOM_START_CEILING: f64 = 0.25;

// Guards floor(fraction * measures) against 0.29 * 100 = 28.999...
const FLOOR_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("leitmotif of {length} measures starting at measure {} does not fit in {total} measures", .start + 1)]
    LeitmotifDoesNotFit {
        start: usize,
        length: usize,
        total: usize,
    },
    #[error("therapy at measure {} does not come after the cancer start at measure {}", .therapy + 1, .start + 1)]
    TherapyBeforeStart { therapy: usize, start: usize },
    #[error(transparent)]
    Score(#[from] ScoreError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub p_insertion: f64,
    pub p_deletion: f64,
    pub p_inversion: f64,
    pub p_translocation: f64,
    pub p_transposition: f64,
    /// Offspring cap per cancer part.
    pub max_offspring: u32,
    /// Fraction of the piece before the cancer starts; `None` draws it.
    pub cancer_start: Option<f64>,
    pub leitmotif_length: usize,
    pub p_reproduction: f64,
    pub treatment_enabled: bool,
    pub survival_rate: f64,
    pub therapy_start: f64,
    pub seed: u64,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            p_insertion: 0.3,
            p_deletion: 0.3,
            p_inversion: 0.3,
            p_translocation: 0.3,
            p_transposition: 0.3,
            max_offspring: 2,
            cancer_start: Some(0.1),
            leitmotif_length: 2,
            p_reproduction: 0.5,
            treatment_enabled: false,
            survival_rate: 0.2,
            therapy_start: 0.7,
            seed: 0,
        }
    }
}

impl EngineParams {
    /// Everything switched off: no mutation, no reproduction, no therapy.
    pub fn inert() -> Self {
        Self {
            p_insertion: 0.0,
            p_deletion: 0.0,
            p_inversion: 0.0,
            p_translocation: 0.0,
            p_transposition: 0.0,
            p_reproduction: 0.0,
            ..Self::default()
        }
    }

    pub fn probability(&self, kind: MutationKind) -> f64 {
        match kind {
            MutationKind::Insertion => self.p_insertion,
            MutationKind::Deletion => self.p_deletion,
            MutationKind::Inversion => self.p_inversion,
            MutationKind::Translocation => self.p_translocation,
            MutationKind::Transposition => self.p_transposition,
        }
    }

    pub fn set_probability(&mut self, kind: MutationKind, p: f64) {
        match kind {
            MutationKind::Insertion => self.p_insertion = p,
            MutationKind::Deletion => self.p_deletion = p,
            MutationKind::Inversion => self.p_inversion = p,
            MutationKind::Translocation => self.p_translocation = p,
            MutationKind::Transposition => self.p_transposition = p,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidParam(msg));
        let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        for kind in MutationKind::TRIAL_ORDER {
            if !unit(self.probability(kind)) {
                return bad(format!("{kind} probability must lie in [0, 1]"));
            }
        }
        for (name, p) in [
            ("reproduction", self.p_reproduction),
            ("survival rate", self.survival_rate),
        ] {
            if !unit(p) {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.max_offspring == 0 {
            return bad("offspring cap must be at least 1".into());
        }
        if self.leitmotif_length == 0 {
            return bad("leitmotif length must be at least 1 measure".into());
        }
        if let Some(start) = self.cancer_start {
            if !(start.is_finite() && (0.0..1.0).contains(&start)) {
                return bad("cancer start must lie in [0, 1)".into());
            }
        }
        if !(self.therapy_start.is_finite()
            && self.therapy_start > 0.0
            && self.therapy_start <= 1.0)
        {
            return bad("therapy start must lie in (0, 1]".into());
        }
        if self.treatment_enabled {
            if let Some(start) = self.cancer_start {
                if self.therapy_start <= start {
                    return bad("therapy start must come after cancer start".into());
                }
            }
        }
        Ok(())
    }
}

/// A fraction of the piece as a measure index.
pub fn fraction_to_measure(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64) + FLOOR_EPSILON).floor() as usize
}

/// The leitmotif of a part as it stood from a given cycle on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeitmotifSnapshot {
    pub from_cycle: u32,
    pub measures: Vec<Measure>,
}

/// A cancer part: the founder or one of its descendants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutantPart {
    pub part_id: String,
    pub parent: Option<String>,
    pub leitmotif: Leitmotif,
    /// Cycle boundary at which the part appeared.
    pub spawn_measure: usize,
    /// Whole measures of silence after `spawn_measure` before it plays.
    pub offset: usize,
    pub alive: bool,
    pub offspring_count: u32,
    pub born_in_cycle: u32,
    pub death_measure: Option<usize>,
    pub history: Vec<LeitmotifSnapshot>,
}

impl MutantPart {
    pub fn is_founder(&self) -> bool {
        self.parent.is_none()
    }

    pub fn play_start(&self) -> usize {
        self.spawn_measure + self.offset
    }

    /// Leitmotif in effect during `cycle`.
    pub fn leitmotif_at(&self, cycle: u32) -> &[Measure] {
        self.history
            .iter()
            .rev()
            .find(|s| s.from_cycle <= cycle)
            .map_or(self.leitmotif.measures.as_slice(), |s| {
                s.measures.as_slice()
            })
    }

    fn record_state(&mut self, cycle: u32) {
        match self.history.last_mut() {
            Some(last) if last.from_cycle == cycle => {
                last.measures = self.leitmotif.measures.clone()
            }
            Some(last) if last.measures == self.leitmotif.measures => {}
            _ => self.history.push(LeitmotifSnapshot {
                from_cycle: cycle,
                measures: self.leitmotif.measures.clone(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TherapyRecord {
    pub start_measure: usize,
    pub killed: Vec<String>,
    pub survived: Vec<String>,
}

/// Where things happen in a run, resolved against a particular score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub total_measures: usize,
    pub founder_part: String,
    pub cancer_start: f64,
    pub start_measure: usize,
    pub leitmotif_length: usize,
    pub therapy_measure: Option<usize>,
    /// Measures at which a reproduction/mutation cycle runs.
    pub cycle_boundaries: Vec<usize>,
}

impl fmt::Display for RunPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "measures:        {}", self.total_measures)?;
        writeln!(f, "founder part:    {}", self.founder_part)?;
        writeln!(
            f,
            "cancer start:    measure {} ({:.4} of the piece)",
            self.start_measure + 1,
            self.cancer_start
        )?;
        writeln!(
            f,
            "leitmotif:       measures {}-{}",
            self.start_measure + 1,
            self.start_measure + self.leitmotif_length
        )?;
        match self.therapy_measure {
            Some(m) => writeln!(f, "therapy:         from measure {}", m + 1)?,
            None => writeln!(f, "therapy:         off")?,
        }
        write!(f, "cycles:          {}", self.cycle_boundaries.len())
    }
}

/// The full record of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineageTree {
    /// Cancer parts in creation order; the founder comes first.
    pub nodes: Vec<MutantPart>,
    pub events: Vec<MutationEvent>,
    pub therapy: Option<TherapyRecord>,
}

impl LineageTree {
    pub fn node(&self, id: &str) -> Option<&MutantPart> {
        self.nodes.iter().find(|n| n.part_id == id)
    }

    pub fn founder(&self) -> &MutantPart {
        &self.nodes[0]
    }

    pub fn children_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a MutantPart> + 'a {
        self.nodes
            .iter()
            .filter(move |n| n.parent.as_deref() == Some(id))
    }
}

/// Mutable simulation state between cycles.
pub struct EngineState {
    pub plan: RunPlan,
    pub nodes: Vec<MutantPart>,
    pub events: Vec<MutationEvent>,
    pub therapy: Option<TherapyRecord>,
    /// Number of completed cycle boundaries.
    pub cycle: u32,
    pub warnings: Vec<String>,
    pub rng: DrawStream,
    reserved_ids: Vec<String>,
    next_mutant: usize,
}

impl EngineState {
    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn into_lineage(self) -> LineageTree {
        LineageTree {
            nodes: self.nodes,
            events: self.events,
            therapy: self.therapy,
        }
    }

    fn fresh_id(&mut self) -> String {
        loop {
            self.next_mutant += 1;
            let id = format!("M{}", self.next_mutant);
            if !self.reserved_ids.contains(&id) {
                return id;
            }
        }
    }
}

/// Picks the founder part and start measure and lifts the leitmotif.
pub fn select_founder(
    score: &Score,
    params: &EngineParams,
    rng: &mut DrawStream,
) -> Result<(MutantPart, RunPlan), EngineError> {
    params.validate()?;
    score.validate()?;
    let total = score.measure_count();
    let founder = &score.parts[rng.below(score.parts.len())];
    let cancer_start = match params.cancer_start {
        Some(s) => s,
        None => rng.unit() * RANDOM_START_CEILING,
    };
    let start = fraction_to_measure(cancer_start, total);
    let n = params.leitmotif_length;
    if start + n > total {
        return Err(EngineError::LeitmotifDoesNotFit {
            start,
            length: n,
            total,
        });
    }
    let therapy_measure = if params.treatment_enabled {
        let m = fraction_to_measure(params.therapy_start, total);
        if m < start || params.therapy_start <= cancer_start {
            return Err(EngineError::TherapyBeforeStart { therapy: m, start });
        }
        Some(m)
    } else {
        None
    };
    let measures = founder.measures[start..start + n].to_vec();
    let leitmotif = Leitmotif {
        measures: measures.clone(),
        source_part: founder.id.clone(),
        source_start: start,
    };
    let node = MutantPart {
        part_id: founder.id.clone(),
        parent: None,
        leitmotif,
        spawn_measure: start,
        offset: 0,
        alive: true,
        offspring_count: 0,
        born_in_cycle: 0,
        death_measure: None,
        history: vec![LeitmotifSnapshot {
            from_cycle: 0,
            measures,
        }],
    };
    let plan = RunPlan {
        total_measures: total,
        founder_part: founder.id.clone(),
        cancer_start,
        start_measure: start,
        leitmotif_length: n,
        therapy_measure,
        cycle_boundaries: (1..)
            .map(|k| start + k * n)
            .take_while(|&b| b < total)
            .collect(),
    };
    Ok((node, plan))
}

/// Resolves where the cancer and therapy start without running anything.
pub fn plan(score: &Score, params: &EngineParams) -> Result<RunPlan, EngineError> {
    let mut rng = DrawStream::from_seed(params.seed);
    select_founder(score, params, &mut rng).map(|(_, plan)| plan)
}

/// Measures a translocation may copy: the input score minus the founder's
/// own leitmotif bars.
pub fn donor_pool(score: &Score, plan: &RunPlan) -> DonorPool {
    DonorPool::new(
        score,
        Some((
            plan.founder_part.as_str(),
            plan.start_measure..plan.start_measure + plan.leitmotif_length,
        )),
    )
}

/// Builds the initial state: founder selected, nothing else happened yet.
pub fn initial_state(score: &Score, params: &EngineParams) -> Result<EngineState, EngineError> {
    let mut rng = DrawStream::from_seed(params.seed);
    let (founder, plan) = select_founder(score, params, &mut rng)?;
    Ok(EngineState {
        plan,
        nodes: vec![founder],
        events: Vec::new(),
        therapy: None,
        cycle: 0,
        warnings: Vec::new(),
        rng,
        reserved_ids: score.parts.iter().map(|p| p.id.clone()).collect(),
        next_mutant: 0,
    })
}

/// One cycle boundary: reproduction, then heritable mutation.
pub fn step_cycle(
    state: &mut EngineState,
    params: &EngineParams,
    registry: &OperatorRegistry,
    donors: &DonorPool,
) {
    state.cycle += 1;
    let cycle = state.cycle;
    let n = state.plan.leitmotif_length;
    let boundary = state.plan.start_measure + (cycle as usize) * n;
    let living: Vec<usize> = (0..state.nodes.len())
        .filter(|&i| state.nodes[i].alive)
        .collect();

    for parent_ix in living {
        let u = state.rng.unit();
        let eligible = state.nodes[parent_ix].offspring_count < params.max_offspring;
        let room = state.nodes.len() < MAX_CANCER_PARTS;
        let mut child_ix = None;
        if eligible && u < params.p_reproduction {
            if room {
                let offset = state.rng.below(n);
                let id = state.fresh_id();
                let parent = &mut state.nodes[parent_ix];
                parent.offspring_count += 1;
                let child = MutantPart {
                    part_id: id,
                    parent: Some(parent.part_id.clone()),
                    leitmotif: parent.leitmotif.clone(),
                    spawn_measure: boundary,
                    offset,
                    alive: true,
                    offspring_count: 0,
                    born_in_cycle: cycle,
                    death_measure: None,
                    history: vec![LeitmotifSnapshot {
                        from_cycle: cycle,
                        measures: parent.leitmotif.measures.clone(),
                    }],
                };
                state.nodes.push(child);
                child_ix = Some(state.nodes.len() - 1);
            } else if !state.warnings.iter().any(|w| w.starts_with("part ceiling")) {
                state.warnings.push(format!(
                    "part ceiling of {MAX_CANCER_PARTS} reached in cycle {cycle}; further reproduction suppressed"
                ));
            }
        }

        mutate(state, parent_ix, params, registry, donors);
        if let Some(c) = child_ix {
            mutate(state, c, params, registry, donors);
        }
    }
}

fn mutate(
    state: &mut EngineState,
    ix: usize,
    params: &EngineParams,
    registry: &OperatorRegistry,
    donors: &DonorPool,
) {
    let cycle = state.cycle;
    let ctx = OperatorContext {
        donors: Some(donors),
    };
    for kind in MutationKind::TRIAL_ORDER {
        if !state.rng.chance(params.probability(kind)) {
            continue;
        }
        let n = state.nodes[ix].leitmotif.len();
        let slot = state.rng.below(n);
        let (measure, detail) = match registry.for_kind(kind) {
            Some(op) => {
                let out = op.apply(
                    &state.nodes[ix].leitmotif.measures[slot],
                    &ctx,
                    &mut state.rng,
                );
                (out.measure, out.detail)
            }
            None => (
                state.nodes[ix].leitmotif.measures[slot].clone(),
                MutationDetail::Skipped {
                    reason: format!("no operator registered as {kind}"),
                },
            ),
        };
        let node = &mut state.nodes[ix];
        node.leitmotif.measures[slot] = measure;
        state.events.push(MutationEvent {
            cycle,
            part: node.part_id.clone(),
            kind,
            measure_index: slot,
            detail,
        });
    }
    state.nodes[ix].record_state(cycle);
}

/// Silences every living part that fails its survival draw.
pub fn apply_therapy(state: &mut EngineState, params: &EngineParams) {
    let Some(measure) = state.plan.therapy_measure else {
        return;
    };
    let mut record = TherapyRecord {
        start_measure: measure,
        killed: Vec::new(),
        survived: Vec::new(),
    };
    for node in state.nodes.iter_mut().filter(|n| n.alive) {
        if state.rng.chance(params.survival_rate) {
            record.survived.push(node.part_id.clone());
        } else {
            node.alive = false;
            node.death_measure = Some(measure);
            record.killed.push(node.part_id.clone());
        }
    }
    state.therapy = Some(record);
}

/// Runs the whole simulation with the standard operators.
pub fn run(score: &Score, params: &EngineParams) -> Result<(Score, LineageTree), EngineError> {
    run_with_registry(score, params, &OperatorRegistry::standard())
}

pub fn run_with_registry(
    score: &Score,
    params: &EngineParams,
    registry: &OperatorRegistry,
) -> Result<(Score, LineageTree), EngineError> {
    let state = simulate(score, params, registry)?;
    let out = render(score, &state.plan, &state.nodes)?;
    Ok((out, state.into_lineage()))
}

/// Runs every cycle and the therapy, stopping short of rendering.
pub fn simulate(
    score: &Score,
    params: &EngineParams,
    registry: &OperatorRegistry,
) -> Result<EngineState, EngineError> {
    let mut state = initial_state(score, params)?;
    let donors = donor_pool(score, &state.plan);
    let therapy_at = state.plan.therapy_measure;
    let mut therapy_pending = therapy_at.is_some();
    for boundary in state.plan.cycle_boundaries.clone() {
        if therapy_pending && therapy_at.is_some_and(|t| t < boundary) {
            apply_therapy(&mut state, params);
            therapy_pending = false;
        }
        step_cycle(&mut state, params, registry, &donors);
        if therapy_pending && therapy_at == Some(boundary) {
            apply_therapy(&mut state, params);
            therapy_pending = false;
        }
    }
    if therapy_pending {
        apply_therapy(&mut state, params);
    }
    Ok(state)
}

/// Builds the output score: the input parts with the founder's slot
/// overwritten from the start measure, plus one part per descendant.
pub fn render(score: &Score, plan: &RunPlan, nodes: &[MutantPart]) -> Result<Score, EngineError> {
    let timeline = score.timeline();
    let founder_part = score
        .part(&plan.founder_part)
        .expect("plan refers to a part of this score");
    let n = plan.leitmotif_length;

    let render_node = |node: &MutantPart, base: Option<&Part>| -> Vec<Measure> {
        (0..plan.total_measures)
            .map(|m| {
                let original = &founder_part.measures[m];
                let silenced = node.death_measure.is_some_and(|d| m >= d);
                let mut out = if silenced || m < node.play_start() {
                    match base {
                        Some(part) if !silenced => part.measures[m].clone(),
                        _ => Measure::silent(m, timeline[m]),
                    }
                } else {
                    let cycle = ((m - plan.start_measure) / n) as u32;
                    let slot = (m - node.play_start()) % n;
                    node.leitmotif_at(cycle)[slot].refit(m, timeline[m])
                };
                out.key = original.key.clone();
                out.clef = original.clef.clone();
                out
            })
            .collect()
    };

    let mut parts: Vec<Part> = score.parts.clone();
    let founder = &nodes[0];
    let slot = parts
        .iter()
        .position(|p| p.id == founder.part_id)
        .expect("founder part exists");
    parts[slot].measures = render_node(founder, Some(founder_part));
    for (i, node) in nodes.iter().enumerate().skip(1) {
        parts.push(Part {
            id: node.part_id.clone(),
            name: format!("{} (mutant {i})", founder_part.name)
                .trim_start()
                .to_string(),
            instrument: founder_part.instrument.clone(),
            measures: render_node(node, None),
        });
    }
    let mut out = Score {
        title: score.title.clone(),
        parts,
        divisions_hint: score.divisions_hint,
    };
    out.sanitize_ties();
    out.validate()?;
    Ok(out)
}
