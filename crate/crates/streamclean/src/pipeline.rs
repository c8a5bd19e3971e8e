//! The cleaning pipeline: a mandatory schema-check stage followed by a
//! configured chain of cleaning modules, each a detection step plus an
//! optional repair step, processing vectors strictly in arrival order with
//! exactly-once state updates.
//!
//! Within one vector, later modules see earlier modules' repairs; a deletion
//! short-circuits the remaining modules. Detection steps without a configured
//! repair log findings but never alter committed values.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detect::{self, ErrorType, Finding, OutlierParams};
use crate::error::{Error, Result};
use crate::model::{AttributeValue, DataVector, Instant, Schema};
use crate::repair::{
    self, Change, CleaningDecision, FdRepair, IntervalRepair, MissingRepair, OrderConflictRepair,
    Outcome, OutlierRepair, RepairStep, WrongTypeRepair,
};
use crate::state::{Horizon, StreamState, WindowSpec};

/// Configuration of one optional cleaning module. The repair strategy may be
/// omitted; the module then only detects.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleConfig {
    Uniqueness {
        repair: Option<OrderConflictRepair>,
    },
    Interval {
        repair: Option<IntervalRepair>,
    },
    Fd {
        repair: Option<FdRepair>,
    },
    Missing {
        repair: Option<MissingRepair>,
        per_attribute: BTreeMap<String, MissingRepair>,
    },
    MissingVector {
        /// Insert interpolated vectors for detected gaps, tagged synthetic.
        synthesize: bool,
    },
    Duplicate {
        repair: Option<OrderConflictRepair>,
    },
    Outlier {
        params: OutlierParams,
        repair: Option<OutlierRepair>,
    },
    Contradiction {
        repair: Option<OrderConflictRepair>,
    },
}

impl ModuleConfig {
    pub fn error_type(&self) -> ErrorType {
        match self {
            ModuleConfig::Uniqueness { .. } => ErrorType::Uniqueness,
            ModuleConfig::Interval { .. } => ErrorType::Interval,
            ModuleConfig::Fd { .. } => ErrorType::Fd,
            ModuleConfig::Missing { .. } => ErrorType::Missing,
            ModuleConfig::MissingVector { .. } => ErrorType::MissingVector,
            ModuleConfig::Duplicate { .. } => ErrorType::Duplicate,
            ModuleConfig::Outlier { .. } => ErrorType::Outlier,
            ModuleConfig::Contradiction { .. } => ErrorType::Contradiction,
        }
    }

    /// Detection-only copy of this module.
    pub fn detection_only(&self) -> ModuleConfig {
        match self {
            ModuleConfig::Uniqueness { .. } => ModuleConfig::Uniqueness { repair: None },
            ModuleConfig::Interval { .. } => ModuleConfig::Interval { repair: None },
            ModuleConfig::Fd { .. } => ModuleConfig::Fd { repair: None },
            ModuleConfig::Missing { per_attribute, .. } => ModuleConfig::Missing {
                repair: None,
                per_attribute: per_attribute.clone(),
            },
            ModuleConfig::MissingVector { .. } => ModuleConfig::MissingVector { synthesize: false },
            ModuleConfig::Duplicate { .. } => ModuleConfig::Duplicate { repair: None },
            ModuleConfig::Outlier { params, .. } => ModuleConfig::Outlier {
                params: *params,
                repair: None,
            },
            ModuleConfig::Contradiction { .. } => ModuleConfig::Contradiction { repair: None },
        }
    }
}

/// Full pipeline configuration: schema, module chain, seed and state limits.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub schema: Schema,
    pub modules: Vec<ModuleConfig>,
    pub seed: u64,
    /// Retention limit for the key and vector stores; `None` keeps the full
    /// prefix (the experiment default).
    pub horizon: Option<Horizon>,
    /// Window buffers to maintain, available to window-scoped detectors.
    pub windows: Vec<WindowSpec>,
    /// Repair strategy of the implicit schema-check stage; `None` detects
    /// type errors without repairing them.
    pub schema_check_repair: Option<WrongTypeRepair>,
}

impl PipelineConfig {
    pub fn new(schema: Schema) -> Self {
        PipelineConfig {
            schema,
            modules: Vec::new(),
            seed: 0,
            horizon: None,
            windows: Vec::new(),
            schema_check_repair: Some(WrongTypeRepair::ConvertWithFixups),
        }
    }

    pub fn with_modules(mut self, modules: Vec<ModuleConfig>) -> Self {
        self.modules = modules;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Strip every repair step, leaving a detection-only pipeline.
    pub fn detection_only(&self) -> PipelineConfig {
        let mut config = self.clone();
        config.schema_check_repair = None;
        config.modules = config
            .modules
            .iter()
            .map(ModuleConfig::detection_only)
            .collect();
        config
    }
}

/// Complete record of one pipeline run: one decision per input vector and the
/// committed stream (synthesized vectors flagged).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub decisions: Vec<CleaningDecision>,
    committed: Vec<(DataVector, bool)>,
}

impl RunLog {
    /// Committed vectors, including synthesized ones.
    pub fn committed(&self) -> impl Iterator<Item = &DataVector> {
        self.committed.iter().map(|(v, _)| v)
    }

    /// Committed vectors that came from the input (synthesized ones excluded).
    pub fn committed_real(&self) -> Vec<DataVector> {
        self.committed
            .iter()
            .filter(|(_, synthetic)| !synthetic)
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub fn synthesized_vectors(&self) -> Vec<DataVector> {
        self.committed
            .iter()
            .filter(|(_, synthetic)| *synthetic)
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.decisions.iter().flat_map(|d| d.findings.iter())
    }

    pub fn deletions(&self) -> u64 {
        self.decisions
            .iter()
            .filter(|d| d.outcome == Outcome::Deleted)
            .count() as u64
    }
}

/// A validated, ready-to-run cleaning pipeline. Single-threaded with respect
/// to state: one logical consumer feeds it vectors in order.
#[derive(Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    state: StreamState,
    rng: ChaCha8Rng,
    log: RunLog,
    cursor: Option<(u64, Instant)>,
}

/// Validate a configuration and construct the pipeline. Module order is
/// preserved exactly as configured; the type check always runs first and may
/// not appear as an optional module.
pub fn build_pipeline(config: PipelineConfig) -> Result<Pipeline> {
    let faults = config.schema.validate();
    if !faults.is_empty() {
        let rendered: Vec<String> = faults.iter().map(ToString::to_string).collect();
        return Err(Error::Config(format!(
            "schema faults: {}",
            rendered.join("; ")
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for module in &config.modules {
        let error_type = module.error_type();
        if !seen.insert(error_type) {
            return Err(Error::Config(format!(
                "duplicate module for error type {error_type}"
            )));
        }
        match module {
            ModuleConfig::Uniqueness { .. } if config.schema.unique_indices().is_empty() => {
                return Err(Error::Config(
                    "uniqueness module requires at least one unique attribute".into(),
                ));
            }
            ModuleConfig::Uniqueness {
                repair: Some(OrderConflictRepair::AlignToFirst),
            }
            | ModuleConfig::Duplicate {
                repair: Some(OrderConflictRepair::AlignToFirst),
            } => {
                return Err(Error::Config(
                    "align_to_first only applies to contradicting records".into(),
                ));
            }
            ModuleConfig::Contradiction { .. } => {
                if config.schema.key_indices().is_empty()
                    || config.schema.contradiction_scope.is_empty()
                {
                    return Err(Error::Config(
                        "contradiction module requires a key and a contradiction scope".into(),
                    ));
                }
            }
            ModuleConfig::MissingVector { .. } if config.schema.expected_cadence_ms.is_none() => {
                return Err(Error::Config(
                    "missing-vector module requires an expected cadence".into(),
                ));
            }
            ModuleConfig::Outlier { params, .. } => {
                if !(params.threshold > 0.0) {
                    return Err(Error::Config("outlier threshold must be positive".into()));
                }
                if let Some(window) = &params.window {
                    window.validate()?;
                    if !config.windows.contains(window) {
                        return Err(Error::Config(
                            "outlier window is not among the configured window buffers".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    for window in &config.windows {
        window.validate()?;
    }
    let state = StreamState::new(&config.schema, config.horizon, &config.windows);
    let rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(Pipeline {
        config,
        state,
        rng,
        log: RunLog::default(),
        cursor: None,
    })
}

impl Pipeline {
    pub fn schema(&self) -> &Schema {
        &self.config.schema
    }

    pub fn state(&self) -> &StreamState {
        &self.state
    }

    pub fn log(&self) -> &RunLog {
        &self.log
    }

    /// Consume the pipeline and hand out the complete run log.
    pub fn into_log(self) -> RunLog {
        self.log
    }

    /// Clean one vector. Vectors must be presented with consecutive indices
    /// and non-decreasing arrival times; anything else is refused without
    /// touching state.
    pub fn process(&mut self, vector: DataVector) -> Result<CleaningDecision> {
        if let Some((last_index, last_arrival)) = self.cursor {
            if vector.sequence_index != last_index + 1 {
                return Err(Error::OutOfOrder(format!(
                    "expected index {} but got {}",
                    last_index + 1,
                    vector.sequence_index
                )));
            }
            if vector.arrival < last_arrival {
                return Err(Error::OutOfOrder(format!(
                    "arrival {} precedes {}",
                    vector.arrival, last_arrival
                )));
            }
        }
        if vector.values.len() != self.config.schema.arity() {
            return Err(Error::ArityMismatch {
                expected: self.config.schema.arity(),
                actual: vector.values.len(),
            });
        }
        self.cursor = Some((vector.sequence_index, vector.arrival));

        let schema = self.config.schema.clone();
        let index = vector.sequence_index;
        let arrival = vector.arrival;
        let mut values = vector.values;
        let mut decision = CleaningDecision {
            vector_index: index,
            outcome: Outcome::Pass,
            changes: Vec::new(),
            findings: Vec::new(),
            notes: Vec::new(),
        };
        let mut deleted = false;
        let mut synthesized: Vec<DataVector> = Vec::new();

        // mandatory schema-check stage
        {
            let probe = DataVector::new(index, arrival, values.clone());
            let findings = detect::detect_wrong_type(&probe, &schema);
            if !findings.is_empty() {
                if let Some(strategy) = self.config.schema_check_repair {
                    let step = repair::repair_wrong_type(&mut values, &findings, &schema, strategy);
                    absorb(&mut decision, step, &mut deleted);
                }
                decision.findings.extend(findings);
            }
        }

        for module in &self.config.modules {
            if deleted {
                break;
            }
            let probe = DataVector::new(index, arrival, values.clone());
            let (findings, step) = match module {
                ModuleConfig::Uniqueness { repair } => {
                    let findings = detect::detect_uniqueness(&probe, &self.state, &schema);
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_order_conflict(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                        )?),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::Interval { repair } => {
                    let findings = detect::detect_interval(&probe, &schema);
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_interval(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                            &mut self.rng,
                        )),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::Fd { repair } => {
                    let findings = detect::detect_fd(&probe, &schema, &self.state);
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_fd(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                        )),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::Missing {
                    repair,
                    per_attribute,
                } => {
                    let findings = detect::detect_missing(&probe, &schema);
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_missing(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                            per_attribute,
                            arrival,
                        )),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::MissingVector { synthesize } => {
                    let findings = detect::detect_missing_vectors(&self.state, &probe, &schema)?;
                    if *synthesize && !findings.is_empty() {
                        synthesized = self.synthesize_gap_vectors(&findings, &schema);
                        decision
                            .notes
                            .push(format!("synthesized {} gap vectors", synthesized.len()));
                    }
                    (findings, None)
                }
                ModuleConfig::Duplicate { repair } => {
                    let findings: Vec<Finding> =
                        detect::detect_duplicate(&probe, &self.state).into_iter().collect();
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_order_conflict(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                        )?),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::Outlier { params, repair } => {
                    let findings = detect::detect_outlier(&probe, &self.state, &schema, params)?;
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_outlier(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            params,
                            *strategy,
                            arrival,
                        )?),
                        _ => None,
                    };
                    (findings, step)
                }
                ModuleConfig::Contradiction { repair } => {
                    let findings = detect::detect_contradiction(&probe, &self.state, &schema);
                    let step = match (repair, findings.is_empty()) {
                        (Some(strategy), false) => Some(repair::repair_order_conflict(
                            &mut values,
                            &findings,
                            &self.state,
                            &schema,
                            *strategy,
                        )?),
                        _ => None,
                    };
                    (findings, step)
                }
            };
            decision.findings.extend(findings);
            if let Some(step) = step {
                absorb(&mut decision, step, &mut deleted);
            }
        }

        // gap vectors precede the current one in the committed stream
        for synthetic in synthesized {
            self.state.commit(&synthetic, &schema)?;
            self.log.committed.push((synthetic, true));
        }

        if deleted {
            decision.outcome = Outcome::Deleted;
            if !decision.changes.is_empty() {
                decision.notes.push(format!(
                    "{} earlier repairs discarded by deletion",
                    decision.changes.len()
                ));
                decision.changes.clear();
            }
        } else {
            decision.outcome = if decision.changes.is_empty() {
                Outcome::Pass
            } else {
                Outcome::Repaired
            };
            let committed = DataVector::new(index, arrival, values);
            self.state.commit(&committed, &schema)?;
            self.log.committed.push((committed, false));
        }
        self.log.decisions.push(decision.clone());
        Ok(decision)
    }

    /// Values for synthesized gap vectors: instant key attributes carry the
    /// slot time, numeric attributes extrapolate the last committed segment,
    /// everything else repeats the last committed value.
    fn synthesize_gap_vectors(&self, findings: &[Finding], schema: &Schema) -> Vec<DataVector> {
        let cadence = match schema.expected_cadence_ms {
            Some(c) => c,
            None => return Vec::new(),
        };
        let prev = match self.state.last_arrival() {
            Some(t) => t,
            None => return Vec::new(),
        };
        let gap_count = findings
            .iter()
            .filter(|f| f.error_type == ErrorType::MissingVector)
            .count();
        let mut vectors = Vec::with_capacity(gap_count);
        for slot in 1..=gap_count {
            let at = prev.plus_millis(cadence * slot as i64);
            let values: Vec<AttributeValue> = schema
                .attributes
                .iter()
                .enumerate()
                .map(|(i, attr)| {
                    if attr.declared_type == crate::model::AttributeKind::Instant && attr.key_member
                    {
                        return AttributeValue::Instant(at);
                    }
                    if attr.declared_type.is_numeric() {
                        let points: Vec<(f64, f64)> = self
                            .state
                            .last_points(i)
                            .iter()
                            .filter_map(|(t, v)| v.as_numeric().map(|x| (t.millis() as f64, x)))
                            .collect();
                        if let [(t0, y0), (t1, y1)] = points.as_slice() {
                            let slope = if t1 == t0 { 0.0 } else { (y1 - y0) / (t1 - t0) };
                            let y = y1 + slope * (at.millis() as f64 - t1);
                            if let Some(v) = AttributeValue::from_numeric(attr.declared_type, y) {
                                return v;
                            }
                        }
                    }
                    self.state
                        .last_value(i)
                        .cloned()
                        .unwrap_or(AttributeValue::Null)
                })
                .collect();
            // synthesized vectors keep the index of the vector that revealed
            // the gap minus their slot distance; they are tagged, not scored
            vectors.push(DataVector::new(0, at, values));
        }
        vectors
    }
}

fn absorb(decision: &mut CleaningDecision, step: RepairStep, deleted: &mut bool) {
    let RepairStep {
        changes,
        notes,
        delete,
    } = step;
    decision.changes.extend(changes);
    decision.notes.extend(notes);
    *deleted |= delete;
}

/// Run a whole ordered source through a fresh pipeline built from `config`.
/// Every vector is processed exactly once; the result is deterministic for a
/// fixed seed and input order.
pub fn run_stream<I>(config: PipelineConfig, source: I) -> Result<RunLog>
where
    I: IntoIterator<Item = DataVector>,
{
    let mut pipeline = build_pipeline(config)?;
    for vector in source {
        pipeline.process(vector)?;
    }
    Ok(pipeline.into_log())
}
