//! Repair strategies per error type: pure transformations from
//! (vector, findings, state snapshot) to a repaired vector or a deletion.
//!
//! Repairs never look past the committed prefix, and the first-arriving
//! vector of a collision is never touched — only later vectors can be aligned
//! or rejected. Every change and every skipped or failed repair lands in the
//! vector's [`CleaningDecision`].

use std::collections::BTreeMap;

use rand::Rng;

use crate::detect::{ErrorType, Finding, OutlierParams};
use crate::error::{Error, Result};
use crate::model::{convert_with_fixups, AttributeKind, AttributeValue, IntervalConstraint, Schema};
use crate::state::{RunningStats, StreamState};

/// Repair strategies for values with a wrong data type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrongTypeRepair {
    /// Plain type conversion.
    Convert,
    /// Conversion plus fixups for typical conversion blockers: decimal
    /// commas, thousands separators, day-first and compact date forms.
    ConvertWithFixups,
    /// Drop the unconvertible value (set null).
    DeleteValue,
}

/// Repair strategies for interval violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalRepair {
    /// Replace with the closest permissible value.
    ClampNearest,
    /// Draw a replacement uniformly from the permissible interval.
    RandomInInterval,
    /// Replace with the running mean, clamped into the interval.
    DistributionMean,
    /// Minimal-change repair from the current vector alone; equivalent to
    /// [`IntervalRepair::ClampNearest`].
    CostBased,
}

/// Repair strategies for missing values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingRepair {
    /// Reject the whole vector.
    DeleteVector,
    /// Keep the null; downstream consumers handle it by rule.
    LeaveNullWithRule,
    Mean,
    Median,
    Mode,
    /// Last committed non-null value of the attribute.
    LastValue,
    /// Linear extrapolation from the last two committed points of the
    /// attribute, evaluated at the vector's arrival time. Only earlier
    /// vectors are available, so this never interpolates forward.
    PreviousOnlyInterpolation,
}

/// Repair strategies for uniqueness violations, duplicates and contradicting
/// records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderConflictRepair {
    /// Reject the later vector; the first occurrence stays authoritative.
    RejectVector,
    /// Overwrite the contradiction-scope attributes with the first-seen
    /// payload (contradictions only).
    AlignToFirst,
}

/// Repair strategies for outliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutlierRepair {
    /// Replace with the closest value the detector no longer flags.
    NearestNonOutlier,
    /// Replace with the running mean.
    DistributionMean,
    /// Drop the value (set null).
    DeleteValue,
}

/// Repair strategies for functional-dependency violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdRepair {
    /// Overwrite the dependent attribute with the mapped value.
    SetDependentFromMapping,
    RejectVector,
}

/// What a cleaning step did to one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Repaired,
    Deleted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Repaired => "repaired",
            Outcome::Deleted => "deleted",
        }
    }
}

/// One value replacement inside a repair.
#[derive(Debug, Clone, PartialEq)]
pub struct Change {
    pub attribute: String,
    pub old: AttributeValue,
    pub new: AttributeValue,
    pub strategy: &'static str,
}

/// Audit record for one processed vector: outcome, the value changes made,
/// the findings that triggered them, and notes for skipped or failed repairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CleaningDecision {
    pub vector_index: u64,
    pub outcome: Outcome,
    pub changes: Vec<Change>,
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

/// Result of one repair step over one vector.
#[derive(Debug, Default)]
pub struct RepairStep {
    pub changes: Vec<Change>,
    pub notes: Vec<String>,
    pub delete: bool,
}

impl RepairStep {
    fn change(
        &mut self,
        schema: &Schema,
        attr: usize,
        values: &mut [AttributeValue],
        new: AttributeValue,
        strategy: &'static str,
    ) {
        let old = std::mem::replace(&mut values[attr], new.clone());
        self.changes.push(Change {
            attribute: schema.attr_name(attr).to_string(),
            old,
            new,
            strategy,
        });
    }
}

fn finding_attr_index(schema: &Schema, finding: &Finding) -> Option<usize> {
    finding
        .attribute
        .as_deref()
        .and_then(|name| schema.attr_index(name))
}

/// Convert annotated wrong-type values to their declared type; values that
/// stay unconvertible under the chosen strategy become null, with the failure
/// recorded.
pub fn repair_wrong_type(
    values: &mut [AttributeValue],
    findings: &[Finding],
    schema: &Schema,
    strategy: WrongTypeRepair,
) -> RepairStep {
    let mut step = RepairStep::default();
    for finding in findings {
        if finding.error_type != ErrorType::WrongType {
            continue;
        }
        let i = match finding_attr_index(schema, finding) {
            Some(i) => i,
            None => continue,
        };
        let declared = schema.attributes[i].declared_type;
        let raw = values[i].render();
        let converted = match strategy {
            WrongTypeRepair::DeleteValue => None,
            WrongTypeRepair::Convert => match declared {
                // render-then-reparse covers both text carriers and
                // mismatched variants
                AttributeKind::Integer => raw.trim().parse::<i64>().ok().map(AttributeValue::Integer),
                AttributeKind::Float => match raw.trim().parse::<f64>() {
                    Ok(f) if f.is_finite() => Some(AttributeValue::Float(f)),
                    _ => None,
                },
                AttributeKind::Boolean => match raw.trim() {
                    "true" => Some(AttributeValue::Boolean(true)),
                    "false" => Some(AttributeValue::Boolean(false)),
                    _ => None,
                },
                AttributeKind::Instant => {
                    crate::model::Instant::parse(raw.trim()).map(AttributeValue::Instant)
                }
                AttributeKind::Text => Some(AttributeValue::Text(raw.clone())),
            },
            WrongTypeRepair::ConvertWithFixups => convert_with_fixups(&raw, declared),
        };
        match converted {
            Some(new) => step.change(schema, i, values, new, "convert"),
            None => {
                step.notes.push(format!(
                    "{}: could not convert {:?} to {}",
                    schema.attr_name(i),
                    raw,
                    declared
                ));
                step.change(schema, i, values, AttributeValue::Null, "delete_value");
            }
        }
    }
    step
}

fn nudge_toward(value: f64, target: f64) -> f64 {
    if value > target {
        f64::from_bits(value.to_bits() - 1)
    } else if value < target {
        f64::from_bits(value.to_bits() + 1)
    } else {
        value
    }
}

/// Closest in-interval point to `x` for a continuous constraint, respecting
/// exclusive bounds.
fn clamp_continuous(
    kind: AttributeKind,
    x: f64,
    lo: f64,
    hi: f64,
    lo_inclusive: bool,
    hi_inclusive: bool,
) -> AttributeValue {
    let mut target = x.clamp(lo, hi);
    if target == lo && !lo_inclusive {
        target = if kind == AttributeKind::Float {
            nudge_toward(lo, f64::INFINITY)
        } else {
            lo + 1.0
        };
    }
    if target == hi && !hi_inclusive {
        target = if kind == AttributeKind::Float {
            nudge_toward(hi, f64::NEG_INFINITY)
        } else {
            hi - 1.0
        };
    }
    AttributeValue::from_numeric(kind, target).expect("numeric kind")
}

fn nearest_discrete(set: &std::collections::BTreeSet<AttributeValue>, x: f64) -> Option<AttributeValue> {
    set.iter()
        .filter_map(|v| v.as_numeric().map(|n| (v, (n - x).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(v, _)| v.clone())
}

/// Replace out-of-interval values according to the chosen strategy.
pub fn repair_interval(
    values: &mut [AttributeValue],
    findings: &[Finding],
    state: &StreamState,
    schema: &Schema,
    strategy: IntervalRepair,
    rng: &mut impl Rng,
) -> RepairStep {
    let mut step = RepairStep::default();
    for finding in findings {
        if finding.error_type != ErrorType::Interval {
            continue;
        }
        let i = match finding_attr_index(schema, finding) {
            Some(i) => i,
            None => continue,
        };
        let attr = &schema.attributes[i];
        let interval = match &attr.interval {
            Some(iv) => iv,
            None => continue,
        };
        let kind = attr.declared_type;
        let x = values[i].as_numeric();
        let replacement = match (strategy, interval) {
            (IntervalRepair::ClampNearest | IntervalRepair::CostBased, constraint) => {
                let label = if strategy == IntervalRepair::CostBased {
                    "cost_based"
                } else {
                    "clamp_nearest"
                };
                let new = match (constraint, x) {
                    (
                        IntervalConstraint::Continuous {
                            lo,
                            hi,
                            lo_inclusive,
                            hi_inclusive,
                        },
                        Some(x),
                    ) => Some(clamp_continuous(kind, x, *lo, *hi, *lo_inclusive, *hi_inclusive)),
                    (IntervalConstraint::Discrete(set), Some(x)) => nearest_discrete(set, x),
                    (IntervalConstraint::Discrete(_), None) => None,
                    (IntervalConstraint::Continuous { .. }, None) => None,
                };
                match new {
                    Some(new) => Some((new, label)),
                    None => {
                        // non-ordinal discrete attribute: fall back to the
                        // most frequent committed in-interval value
                        let mode = state
                            .mode(i)
                            .filter(|v| interval.contains(v))
                            .cloned();
                        match mode {
                            Some(new) => {
                                step.notes.push(format!(
                                    "{}: clamp has no ordering; used mode of prefix",
                                    attr.name
                                ));
                                Some((new, "mode_fallback"))
                            }
                            None => {
                                step.notes.push(format!(
                                    "{}: no repair value available",
                                    attr.name
                                ));
                                None
                            }
                        }
                    }
                }
            }
            (IntervalRepair::RandomInInterval, IntervalConstraint::Discrete(set)) => {
                let pick = rng.gen_range(0..set.len());
                set.iter().nth(pick).cloned().map(|v| (v, "random_in_interval"))
            }
            (
                IntervalRepair::RandomInInterval,
                IntervalConstraint::Continuous { lo, hi, .. },
            ) => {
                let draw = match kind {
                    AttributeKind::Float => rng.gen_range(*lo..=*hi),
                    _ => rng.gen_range(lo.ceil() as i64..=hi.floor() as i64) as f64,
                };
                AttributeValue::from_numeric(kind, draw).map(|v| (v, "random_in_interval"))
            }
            (IntervalRepair::DistributionMean, constraint) => {
                match state.stats(i).and_then(RunningStats::mean) {
                    Some(mean) => match constraint {
                        IntervalConstraint::Continuous {
                            lo,
                            hi,
                            lo_inclusive,
                            hi_inclusive,
                        } => Some((
                            clamp_continuous(kind, mean, *lo, *hi, *lo_inclusive, *hi_inclusive),
                            "distribution_mean",
                        )),
                        IntervalConstraint::Discrete(set) => {
                            nearest_discrete(set, mean).map(|v| (v, "distribution_mean"))
                        }
                    },
                    None => {
                        step.notes.push(format!(
                            "{}: no prefix data for distribution repair",
                            attr.name
                        ));
                        None
                    }
                }
            }
        };
        if let Some((new, label)) = replacement {
            step.change(schema, i, values, new, label);
        }
    }
    step
}

/// Impute (or delete on) missing values. `per_attribute` overrides the
/// default strategy for individual attributes; `arrival` is the arrival time
/// of the vector under repair (interpolation evaluates there).
pub fn repair_missing(
    values: &mut [AttributeValue],
    findings: &[Finding],
    state: &StreamState,
    schema: &Schema,
    default: MissingRepair,
    per_attribute: &BTreeMap<String, MissingRepair>,
    arrival: crate::model::Instant,
) -> RepairStep {
    let mut step = RepairStep::default();
    let strategy_for = |name: &str| *per_attribute.get(name).unwrap_or(&default);

    // a single delete-vector attribute rejects the whole vector
    for finding in findings {
        if finding.error_type != ErrorType::Missing {
            continue;
        }
        if let Some(name) = finding.attribute.as_deref() {
            if strategy_for(name) == MissingRepair::DeleteVector {
                step.delete = true;
                step.notes.push(format!("{name}: missing value, vector rejected"));
                return step;
            }
        }
    }

    for finding in findings {
        if finding.error_type != ErrorType::Missing {
            continue;
        }
        let i = match finding_attr_index(schema, finding) {
            Some(i) => i,
            None => continue,
        };
        let attr = &schema.attributes[i];
        let numeric = attr.declared_type.is_numeric();
        let mut strategy = strategy_for(&attr.name);
        if !numeric
            && matches!(
                strategy,
                MissingRepair::Mean | MissingRepair::Median | MissingRepair::PreviousOnlyInterpolation
            )
        {
            step.notes.push(format!(
                "{}: numeric strategy on a non-numeric attribute; used mode",
                attr.name
            ));
            strategy = MissingRepair::Mode;
        }
        let replacement: Option<(AttributeValue, &'static str)> = match strategy {
            MissingRepair::DeleteVector => unreachable!("handled above"),
            MissingRepair::LeaveNullWithRule => {
                step.notes
                    .push(format!("{}: left null for rule-based handling", attr.name));
                None
            }
            MissingRepair::Mean => state
                .stats(i)
                .and_then(RunningStats::mean)
                .and_then(|m| AttributeValue::from_numeric(attr.declared_type, m))
                .map(|v| (v, "mean")),
            MissingRepair::Median => state
                .median(i)
                .and_then(|m| AttributeValue::from_numeric(attr.declared_type, m))
                .map(|v| (v, "median")),
            MissingRepair::Mode => state.mode(i).cloned().map(|v| (v, "mode")),
            MissingRepair::LastValue => state.last_value(i).cloned().map(|v| (v, "last_value")),
            MissingRepair::PreviousOnlyInterpolation => {
                let points = state.last_points(i);
                let numeric_points: Vec<(f64, f64)> = points
                    .iter()
                    .filter_map(|(t, v)| v.as_numeric().map(|x| (t.millis() as f64, x)))
                    .collect();
                match numeric_points.as_slice() {
                    [] => None,
                    [(_, y)] => {
                        step.notes.push(format!(
                            "{}: single prefix point; extrapolated as constant",
                            attr.name
                        ));
                        AttributeValue::from_numeric(attr.declared_type, *y)
                            .map(|v| (v, "previous_only_interpolation"))
                    }
                    [(t0, y0), (t1, y1)] => {
                        let slope = if t1 == t0 { 0.0 } else { (y1 - y0) / (t1 - t0) };
                        let y = y1 + slope * (arrival.millis() as f64 - t1);
                        AttributeValue::from_numeric(attr.declared_type, y)
                            .map(|v| (v, "previous_only_interpolation"))
                    }
                    _ => unreachable!("history keeps at most two points"),
                }
            }
        };
        match replacement {
            Some((new, label)) => step.change(schema, i, values, new, label),
            None => {
                if strategy != MissingRepair::LeaveNullWithRule {
                    step.notes.push(format!(
                        "{}: no prefix data for {strategy:?}; value deferred",
                        attr.name
                    ));
                }
            }
        }
    }
    step
}

/// Delete or align a vector that collides with an earlier one. Alignment is
/// only meaningful for contradictions: there is nothing to align for
/// duplicates or uniqueness collisions.
pub fn repair_order_conflict(
    values: &mut [AttributeValue],
    findings: &[Finding],
    state: &StreamState,
    schema: &Schema,
    strategy: OrderConflictRepair,
) -> Result<RepairStep> {
    let mut step = RepairStep::default();
    let relevant: Vec<&Finding> = findings
        .iter()
        .filter(|f| {
            matches!(
                f.error_type,
                ErrorType::Uniqueness | ErrorType::Duplicate | ErrorType::Contradiction
            )
        })
        .collect();
    if relevant.is_empty() {
        return Ok(step);
    }
    match strategy {
        OrderConflictRepair::RejectVector => {
            step.delete = true;
            Ok(step)
        }
        OrderConflictRepair::AlignToFirst => {
            if relevant
                .iter()
                .any(|f| f.error_type != ErrorType::Contradiction)
            {
                return Err(Error::Usage(
                    "align_to_first only applies to contradicting records".into(),
                ));
            }
            let key_indices = schema.key_indices();
            let key: Vec<AttributeValue> =
                key_indices.iter().map(|&i| values[i].clone()).collect();
            let payload = state
                .key_store()
                .first_payload(&key)
                .cloned()
                .ok_or_else(|| Error::Usage("no first payload recorded for the key".into()))?;
            for (pos, &i) in schema.scope_indices().iter().enumerate() {
                if values[i] != payload[pos] {
                    step.change(schema, i, values, payload[pos].clone(), "align_to_first");
                }
            }
            Ok(step)
        }
    }
}

/// Replace (or drop) flagged outliers against the same statistics snapshot
/// the detector used, so a repaired value is no longer flagged.
pub fn repair_outlier(
    values: &mut [AttributeValue],
    findings: &[Finding],
    state: &StreamState,
    schema: &Schema,
    params: &OutlierParams,
    strategy: OutlierRepair,
    arrival: crate::model::Instant,
) -> Result<RepairStep> {
    let mut step = RepairStep::default();
    let window_stats = match &params.window {
        Some(spec) => Some(state.window_snapshot(spec, arrival)?),
        None => None,
    };
    for finding in findings {
        if finding.error_type != ErrorType::Outlier {
            continue;
        }
        let i = match finding_attr_index(schema, finding) {
            Some(i) => i,
            None => continue,
        };
        let kind = schema.attributes[i].declared_type;
        let stats = match &window_stats {
            Some(snapshot) => snapshot[i].as_ref(),
            None => state.stats(i),
        };
        let (mean, std) = match stats.and_then(|s| s.mean().zip(s.std_dev())) {
            Some(pair) => pair,
            None => {
                step.notes.push(format!(
                    "{}: statistics undefined, repair skipped",
                    schema.attr_name(i)
                ));
                continue;
            }
        };
        match strategy {
            OutlierRepair::DeleteValue => {
                step.change(schema, i, values, AttributeValue::Null, "delete_value");
            }
            OutlierRepair::DistributionMean => {
                if let Some(new) = AttributeValue::from_numeric(kind, mean) {
                    step.change(schema, i, values, new, "distribution_mean");
                }
            }
            OutlierRepair::NearestNonOutlier => {
                let x = values[i].as_numeric().unwrap_or(mean);
                let mut target = if std == 0.0 {
                    mean
                } else if x >= mean {
                    mean + params.threshold * std
                } else {
                    mean - params.threshold * std
                };
                if kind == AttributeKind::Integer {
                    // round toward the mean so the result stays inside the
                    // acceptance region
                    target = if target >= mean {
                        target.floor().max(mean)
                    } else {
                        target.ceil().min(mean)
                    };
                } else {
                    let mut guard = 0;
                    while (target - mean).abs() > params.threshold * std && guard < 8 {
                        target = nudge_toward(target, mean);
                        guard += 1;
                    }
                }
                if let Some(new) = AttributeValue::from_numeric(kind, target) {
                    step.change(schema, i, values, new, "nearest_non_outlier");
                }
            }
        }
    }
    Ok(step)
}

/// Re-apply every functional dependency in schema declaration order,
/// overwriting mismatched dependent values from the mapping; with several
/// rules on one attribute the later application wins, and every application
/// is recorded.
pub fn repair_fd(
    values: &mut [AttributeValue],
    findings: &[Finding],
    state: &StreamState,
    schema: &Schema,
    strategy: FdRepair,
) -> RepairStep {
    let mut step = RepairStep::default();
    if !findings.iter().any(|f| f.error_type == ErrorType::Fd) {
        return step;
    }
    if strategy == FdRepair::RejectVector {
        step.delete = true;
        return step;
    }
    for (k, fd) in schema.functional_dependencies.iter().enumerate() {
        let dep_idx = match schema.attr_index(&fd.dependent) {
            Some(i) => i,
            None => continue,
        };
        if values[dep_idx].is_null() {
            continue;
        }
        let tuple: Option<Vec<AttributeValue>> = fd
            .determinant
            .iter()
            .map(|name| {
                let i = schema.attr_index(name)?;
                let v = &values[i];
                (!v.is_null()).then(|| v.clone())
            })
            .collect();
        let tuple = match tuple {
            Some(t) => t,
            None => continue,
        };
        let expected = fd
            .mapping
            .get(&tuple)
            .or_else(|| state.fd_learned(k).get(&tuple));
        match expected {
            Some(expected) if *expected != values[dep_idx] => {
                step.change(
                    schema,
                    dep_idx,
                    values,
                    expected.clone(),
                    "set_dependent_from_mapping",
                );
            }
            Some(_) => {}
            None => {
                step.notes.push(format!(
                    "{}: no rule for the determinant tuple, value kept",
                    fd.label()
                ));
            }
        }
    }
    step
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect;
    use crate::model::{DataVector, Instant, SchemaAttribute};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn float_schema() -> Schema {
        Schema::new(vec![
            SchemaAttribute::new("x", AttributeKind::Float)
                .not_null()
                .with_interval(IntervalConstraint::inclusive(0.0, 100.0)),
        ])
    }

    fn finding(attr: &str, error_type: ErrorType) -> Finding {
        Finding {
            vector_index: 1,
            attribute: Some(attr.into()),
            error_type,
            detail: String::new(),
        }
    }

    #[test]
    fn wrong_type_fixups_recover_decimal_comma() {
        let schema = float_schema();
        let mut values = vec![AttributeValue::Text("3,14".into())];
        let step = repair_wrong_type(
            &mut values,
            &[finding("x", ErrorType::WrongType)],
            &schema,
            WrongTypeRepair::ConvertWithFixups,
        );
        assert_eq!(values[0], AttributeValue::Float(3.14));
        assert_eq!(step.changes.len(), 1);
    }

    #[test]
    fn wrong_type_plain_conversion() {
        let schema = Schema::new(vec![SchemaAttribute::new("n", AttributeKind::Integer)]);
        let mut values = vec![AttributeValue::Text("42".into())];
        repair_wrong_type(
            &mut values,
            &[finding("n", ErrorType::WrongType)],
            &schema,
            WrongTypeRepair::Convert,
        );
        assert_eq!(values[0], AttributeValue::Integer(42));
    }

    #[test]
    fn wrong_type_unconvertible_becomes_null_with_note() {
        let schema = float_schema();
        let mut values = vec![AttributeValue::Text("abc".into())];
        let step = repair_wrong_type(
            &mut values,
            &[finding("x", ErrorType::WrongType)],
            &schema,
            WrongTypeRepair::ConvertWithFixups,
        );
        assert!(values[0].is_null());
        assert_eq!(step.notes.len(), 1);
    }

    #[test]
    fn interval_clamp_uses_nearest_bound() {
        let schema = float_schema();
        let state = StreamState::new(&schema, None, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut values = vec![AttributeValue::Float(130.0)];
        repair_interval(
            &mut values,
            &[finding("x", ErrorType::Interval)],
            &state,
            &schema,
            IntervalRepair::ClampNearest,
            &mut rng,
        );
        assert_eq!(values[0], AttributeValue::Float(100.0));
    }

    #[test]
    fn interval_distribution_mean_inside_interval() {
        let schema = float_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        for (i, x) in [49.0, 50.0, 51.0].into_iter().enumerate() {
            state
                .commit(
                    &DataVector::new(
                        i as u64 + 1,
                        Instant::from_millis(i as i64),
                        vec![AttributeValue::Float(x)],
                    ),
                    &schema,
                )
                .unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut values = vec![AttributeValue::Float(-5.0)];
        repair_interval(
            &mut values,
            &[finding("x", ErrorType::Interval)],
            &state,
            &schema,
            IntervalRepair::DistributionMean,
            &mut rng,
        );
        assert_eq!(values[0], AttributeValue::Float(50.0));
    }

    #[test]
    fn interval_random_draw_is_reproducible_and_in_range() {
        let schema = Schema::new(vec![SchemaAttribute::new("x", AttributeKind::Float)
            .with_interval(IntervalConstraint::inclusive(0.0, 1.0))]);
        let state = StreamState::new(&schema, None, &[]);
        let draw = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut values = vec![AttributeValue::Float(5.0)];
            repair_interval(
                &mut values,
                &[finding("x", ErrorType::Interval)],
                &state,
                &schema,
                IntervalRepair::RandomInInterval,
                &mut rng,
            );
            match values[0] {
                AttributeValue::Float(f) => f,
                _ => unreachable!(),
            }
        };
        let a = draw(7);
        let b = draw(7);
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn missing_mean_and_empty_prefix_deferral() {
        let schema = float_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        let overrides = BTreeMap::new();

        let mut values = vec![AttributeValue::Null];
        let step = repair_missing(
            &mut values,
            &[finding("x", ErrorType::Missing)],
            &state,
            &schema,
            MissingRepair::Mean,
            &overrides,
            Instant::from_millis(10),
        );
        assert!(values[0].is_null());
        assert_eq!(step.notes.len(), 1);

        for (i, x) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            state
                .commit(
                    &DataVector::new(
                        i as u64 + 1,
                        Instant::from_millis(i as i64),
                        vec![AttributeValue::Float(x)],
                    ),
                    &schema,
                )
                .unwrap();
        }
        let mut values = vec![AttributeValue::Null];
        repair_missing(
            &mut values,
            &[finding("x", ErrorType::Missing)],
            &state,
            &schema,
            MissingRepair::Mean,
            &overrides,
            Instant::from_millis(10),
        );
        assert_eq!(values[0], AttributeValue::Float(2.0));
    }

    #[test]
    fn missing_interpolation_extends_the_last_segment() {
        let schema = float_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        state
            .commit(
                &DataVector::new(1, Instant::from_millis(0), vec![AttributeValue::Float(10.0)]),
                &schema,
            )
            .unwrap();
        state
            .commit(
                &DataVector::new(2, Instant::from_millis(5), vec![AttributeValue::Float(20.0)]),
                &schema,
            )
            .unwrap();
        let mut values = vec![AttributeValue::Null];
        repair_missing(
            &mut values,
            &[finding("x", ErrorType::Missing)],
            &state,
            &schema,
            MissingRepair::PreviousOnlyInterpolation,
            &BTreeMap::new(),
            Instant::from_millis(10),
        );
        // line through (0,10) and (5,20), evaluated at t=10
        assert_eq!(values[0], AttributeValue::Float(30.0));
    }

    #[test]
    fn order_conflict_align_rejects_non_contradictions() {
        let schema = float_schema();
        let state = StreamState::new(&schema, None, &[]);
        let mut values = vec![AttributeValue::Float(1.0)];
        let err = repair_order_conflict(
            &mut values,
            &[Finding {
                vector_index: 1,
                attribute: None,
                error_type: ErrorType::Duplicate,
                detail: String::new(),
            }],
            &state,
            &schema,
            OrderConflictRepair::AlignToFirst,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn order_conflict_align_copies_first_payload() {
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("id", AttributeKind::Integer).unique_key(),
            SchemaAttribute::new("x", AttributeKind::Float),
        ]);
        schema.contradiction_scope = ["x".to_string()].into_iter().collect();
        let mut state = StreamState::new(&schema, None, &[]);
        state
            .commit(
                &DataVector::new(
                    1,
                    Instant::from_millis(0),
                    vec![AttributeValue::Integer(9), AttributeValue::Float(10.0)],
                ),
                &schema,
            )
            .unwrap();
        let mut values = vec![AttributeValue::Integer(9), AttributeValue::Float(12.0)];
        let step = repair_order_conflict(
            &mut values,
            &[finding("x", ErrorType::Contradiction)],
            &state,
            &schema,
            OrderConflictRepair::AlignToFirst,
        )
        .unwrap();
        assert_eq!(values[1], AttributeValue::Float(10.0));
        assert_eq!(step.changes.len(), 1);
    }

    #[test]
    fn outlier_nearest_sits_on_the_acceptance_boundary() {
        let schema = float_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        for i in 0..40 {
            let x = if i % 2 == 0 { 1.0 } else { -1.0 };
            state
                .commit(
                    &DataVector::new(
                        i + 1,
                        Instant::from_millis(i as i64),
                        vec![AttributeValue::Float(x)],
                    ),
                    &schema,
                )
                .unwrap();
        }
        let params = OutlierParams::default();
        let run = |x: f64| {
            let mut values = vec![AttributeValue::Float(x)];
            repair_outlier(
                &mut values,
                &[finding("x", ErrorType::Outlier)],
                &state,
                &schema,
                &params,
                OutlierRepair::NearestNonOutlier,
                Instant::from_millis(100),
            )
            .unwrap();
            values
        };
        let high = run(10.0);
        assert_eq!(high[0], AttributeValue::Float(3.0));
        let low = run(-10.0);
        assert_eq!(low[0], AttributeValue::Float(-3.0));

        // the repaired value is not flagged against the same snapshot
        let repaired = DataVector::new(41, Instant::from_millis(100), high);
        assert!(detect::detect_outlier(&repaired, &state, &schema, &params)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn fd_repair_applies_rules_in_declaration_order() {
        use crate::model::{FunctionalDependency, UnknownTuplePolicy};
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("a", AttributeKind::Integer),
            SchemaAttribute::new("b", AttributeKind::Text),
        ]);
        // two rules on the same dependent saying different things; the later
        // declaration wins
        for expected in ["x", "z"] {
            schema.functional_dependencies.push(FunctionalDependency {
                determinant: vec!["a".into()],
                dependent: "b".into(),
                mapping: [(
                    vec![AttributeValue::Integer(1)],
                    AttributeValue::Text(expected.into()),
                )]
                .into_iter()
                .collect(),
                unknown_policy: UnknownTuplePolicy::Ignore,
            });
        }
        let state = StreamState::new(&schema, None, &[]);
        let mut values = vec![AttributeValue::Integer(1), AttributeValue::Text("y".into())];
        let step = repair_fd(
            &mut values,
            &[finding("b", ErrorType::Fd)],
            &state,
            &schema,
            FdRepair::SetDependentFromMapping,
        );
        assert_eq!(values[1], AttributeValue::Text("z".into()));
        assert_eq!(step.changes.len(), 2);
    }

    #[test]
    fn fd_repair_records_unknown_tuples() {
        use crate::model::{FunctionalDependency, UnknownTuplePolicy};
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("a", AttributeKind::Integer),
            SchemaAttribute::new("b", AttributeKind::Text),
        ]);
        schema.functional_dependencies.push(FunctionalDependency {
            determinant: vec!["a".into()],
            dependent: "b".into(),
            mapping: [(
                vec![AttributeValue::Integer(1)],
                AttributeValue::Text("x".into()),
            )]
            .into_iter()
            .collect(),
            unknown_policy: UnknownTuplePolicy::Ignore,
        });
        let state = StreamState::new(&schema, None, &[]);
        let mut values = vec![AttributeValue::Integer(2), AttributeValue::Text("y".into())];
        let step = repair_fd(
            &mut values,
            &[finding("b", ErrorType::Fd)],
            &state,
            &schema,
            FdRepair::SetDependentFromMapping,
        );
        assert_eq!(values[1], AttributeValue::Text("y".into()));
        assert_eq!(step.notes.len(), 1);
    }
}
