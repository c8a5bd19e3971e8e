//! One detection operation per supported error type.
//!
//! Every detector consumes only the current vector plus a [`StreamState`]
//! snapshot of the committed prefix: nothing here can look ahead. Type,
//! interval, missing-value and (rule-backed) dependency checks are
//! position-independent; uniqueness, duplicate, contradiction and outlier
//! checks depend on what arrived earlier, so the first vector of any
//! collision is never flagged.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{AttributeValue, DataVector, Instant, Schema, UnknownTuplePolicy};
use crate::state::{StreamState, WindowSpec};

/// The error types the pipeline can detect and repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorType {
    Uniqueness,
    WrongType,
    Interval,
    Fd,
    Missing,
    Duplicate,
    Outlier,
    Contradiction,
    MissingVector,
}

impl ErrorType {
    pub fn name(self) -> &'static str {
        match self {
            ErrorType::Uniqueness => "uniqueness",
            ErrorType::WrongType => "wrong_type",
            ErrorType::Interval => "interval",
            ErrorType::Fd => "fd",
            ErrorType::Missing => "missing",
            ErrorType::Duplicate => "duplicate",
            ErrorType::Outlier => "outlier",
            ErrorType::Contradiction => "contradiction",
            ErrorType::MissingVector => "missing_vector",
        }
    }

    pub fn parse(s: &str) -> Option<ErrorType> {
        Some(match s {
            "uniqueness" => ErrorType::Uniqueness,
            "wrong_type" => ErrorType::WrongType,
            "interval" => ErrorType::Interval,
            "fd" => ErrorType::Fd,
            "missing" => ErrorType::Missing,
            "duplicate" => ErrorType::Duplicate,
            "outlier" => ErrorType::Outlier,
            "contradiction" => ErrorType::Contradiction,
            "missing_vector" => ErrorType::MissingVector,
            _ => return None,
        })
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One detected rule violation.
///
/// `attribute` is present for value-level findings and absent for
/// whole-vector findings (duplicates, missing vectors, composite-key
/// collisions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub vector_index: u64,
    pub attribute: Option<String>,
    pub error_type: ErrorType,
    pub detail: String,
}

impl Finding {
    fn value(index: u64, attr: &str, error_type: ErrorType, detail: String) -> Self {
        Finding {
            vector_index: index,
            attribute: Some(attr.to_string()),
            error_type,
            detail,
        }
    }

    fn whole(index: u64, error_type: ErrorType, detail: String) -> Self {
        Finding {
            vector_index: index,
            attribute: None,
            error_type,
            detail,
        }
    }
}

/// Flag values whose active variant does not match the declared attribute
/// type (including fields the parser had to carry as raw text). Nulls are not
/// type errors.
pub fn detect_wrong_type(vector: &DataVector, schema: &Schema) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (i, (value, attr)) in vector.values.iter().zip(&schema.attributes).enumerate() {
        let _ = i;
        match value.kind() {
            None => {}
            Some(kind) if kind == attr.declared_type => {}
            Some(kind) => findings.push(Finding::value(
                vector.sequence_index,
                &attr.name,
                ErrorType::WrongType,
                format!(
                    "value {:?} has type {} where {} is declared",
                    value.render(),
                    kind,
                    attr.declared_type
                ),
            )),
        }
    }
    findings
}

/// Flag a repeat of an already-seen uniqueness tuple. The first vector
/// carrying a tuple is never flagged; nulls in unique attributes are the
/// missing-value module's concern, not a uniqueness violation.
pub fn detect_uniqueness(
    vector: &DataVector,
    state: &StreamState,
    schema: &Schema,
) -> Vec<Finding> {
    let unique_idx = schema.unique_indices();
    let tuple = match StreamState::unique_tuple_of(schema, vector) {
        Some(t) => t,
        None => return Vec::new(),
    };
    if !state.key_store().unique_seen(&tuple) {
        return Vec::new();
    }
    let rendered: Vec<String> = tuple.iter().map(AttributeValue::render).collect();
    let detail = format!("value ({}) already present", rendered.join(","));
    let finding = if unique_idx.len() == 1 {
        Finding::value(
            vector.sequence_index,
            schema.attr_name(unique_idx[0]),
            ErrorType::Uniqueness,
            detail,
        )
    } else {
        Finding::whole(vector.sequence_index, ErrorType::Uniqueness, detail)
    };
    vec![finding]
}

/// Flag non-null values outside their interval constraint. Needs no state:
/// the check looks only at the current vector. Values whose type does not
/// match the declaration are left to the type check.
pub fn detect_interval(vector: &DataVector, schema: &Schema) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (value, attr) in vector.values.iter().zip(&schema.attributes) {
        let interval = match &attr.interval {
            Some(iv) => iv,
            None => continue,
        };
        if value.is_null() || value.kind() != Some(attr.declared_type) {
            continue;
        }
        if !interval.contains(value) {
            findings.push(Finding::value(
                vector.sequence_index,
                &attr.name,
                ErrorType::Interval,
                format!("value {} outside the permissible interval", value.render()),
            ));
        }
    }
    findings
}

/// Check every functional dependency whose determinant tuple is fully present.
///
/// Rules come from the schema's explicit lookup tables plus, for
/// `learn-first-seen` dependencies, the rules learned from committed vectors
/// (the only part of this check that touches state).
pub fn detect_fd(vector: &DataVector, schema: &Schema, state: &StreamState) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (k, fd) in schema.functional_dependencies.iter().enumerate() {
        let dep_idx = match schema.attr_index(&fd.dependent) {
            Some(i) => i,
            None => continue,
        };
        let dep = &vector.values[dep_idx];
        if dep.is_null() {
            continue;
        }
        let tuple: Option<Vec<AttributeValue>> = fd
            .determinant
            .iter()
            .map(|name| {
                let i = schema.attr_index(name)?;
                let v = &vector.values[i];
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
            Some(expected) if expected != dep => findings.push(Finding::value(
                vector.sequence_index,
                &fd.dependent,
                ErrorType::Fd,
                format!(
                    "{} expects {} but found {}",
                    fd.label(),
                    expected.render(),
                    dep.render()
                ),
            )),
            Some(_) => {}
            None => {
                if fd.unknown_policy == UnknownTuplePolicy::Reject {
                    let rendered: Vec<String> = tuple.iter().map(AttributeValue::render).collect();
                    findings.push(Finding::value(
                        vector.sequence_index,
                        &fd.dependent,
                        ErrorType::Fd,
                        format!("{} has no rule for ({})", fd.label(), rendered.join(",")),
                    ));
                }
            }
        }
    }
    findings
}

/// Flag null values in non-nullable attributes (markers were already
/// normalized to null at parse time).
pub fn detect_missing(vector: &DataVector, schema: &Schema) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (value, attr) in vector.values.iter().zip(&schema.attributes) {
        if value.is_null() && !attr.nullable {
            findings.push(Finding::value(
                vector.sequence_index,
                &attr.name,
                ErrorType::Missing,
                "null value in a non-nullable attribute".into(),
            ));
        }
    }
    findings
}

/// For cadenced streams, flag every expected slot strictly between the last
/// committed arrival and the current vector's arrival.
pub fn detect_missing_vectors(
    state: &StreamState,
    vector: &DataVector,
    schema: &Schema,
) -> Result<Vec<Finding>> {
    let cadence = schema.expected_cadence_ms.ok_or_else(|| {
        Error::Usage("missing-vector detection requires an expected cadence".into())
    })?;
    let prev = match state.last_arrival() {
        Some(t) => t,
        None => return Ok(Vec::new()),
    };
    let mut findings = Vec::new();
    let mut slot = prev.millis() + cadence;
    while slot < vector.arrival.millis() {
        findings.push(Finding::whole(
            vector.sequence_index,
            ErrorType::MissingVector,
            format!("no vector for expected slot {}", Instant::from_millis(slot)),
        ));
        slot += cadence;
    }
    Ok(findings)
}

/// Flag an exact repeat of an earlier vector (all attribute values equal).
/// A repeated key with a different payload is a contradiction, not a
/// duplicate.
pub fn detect_duplicate(vector: &DataVector, state: &StreamState) -> Option<Finding> {
    state.vector_store().contains(&vector.values).then(|| {
        Finding::whole(
            vector.sequence_index,
            ErrorType::Duplicate,
            "identical vector already present".into(),
        )
    })
}

/// For a key seen before, flag every contradiction-scope attribute whose
/// value differs from the first payload recorded for that key.
pub fn detect_contradiction(
    vector: &DataVector,
    state: &StreamState,
    schema: &Schema,
) -> Vec<Finding> {
    let key = match StreamState::key_of(schema, vector) {
        Some(k) => k,
        None => return Vec::new(),
    };
    let payload = match state.key_store().first_payload(&key) {
        Some(p) => p,
        None => return Vec::new(),
    };
    let mut findings = Vec::new();
    for (pos, &i) in schema.scope_indices().iter().enumerate() {
        if vector.values[i] != payload[pos] {
            findings.push(Finding::value(
                vector.sequence_index,
                schema.attr_name(i),
                ErrorType::Contradiction,
                format!(
                    "value {} contradicts first-seen value {}",
                    vector.values[i].render(),
                    payload[pos].render()
                ),
            ));
        }
    }
    findings
}

/// Parameters of the rolling z-score outlier rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierParams {
    /// Deviations beyond `threshold` standard deviations are findings.
    pub threshold: f64,
    /// Minimum committed observations of an attribute before it is checked.
    pub warmup: u64,
    /// Compute statistics over this window instead of the full prefix.
    pub window: Option<WindowSpec>,
}

impl Default for OutlierParams {
    fn default() -> Self {
        OutlierParams {
            threshold: 3.0,
            warmup: 30,
            window: None,
        }
    }
}

/// Flag numeric values deviating more than `threshold` standard deviations
/// from the running mean of the committed prefix (or of the configured
/// window). Deterministic given the state snapshot, but the verdict for the
/// same value changes with stream position as the running statistics move.
pub fn detect_outlier(
    vector: &DataVector,
    state: &StreamState,
    schema: &Schema,
    params: &OutlierParams,
) -> Result<Vec<Finding>> {
    let window_stats = match &params.window {
        Some(spec) => Some(state.window_snapshot(spec, vector.arrival)?),
        None => None,
    };
    let mut findings = Vec::new();
    for (i, (value, attr)) in vector.values.iter().zip(&schema.attributes).enumerate() {
        if !attr.declared_type.is_numeric() || value.kind() != Some(attr.declared_type) {
            continue;
        }
        let x = match value.as_numeric() {
            Some(x) => x,
            None => continue,
        };
        let stats = match &window_stats {
            Some(snapshot) => snapshot[i].as_ref(),
            None => state.stats(i),
        };
        let stats = match stats {
            Some(s) if s.count() >= params.warmup && s.count() > 0 => s,
            _ => continue,
        };
        let mean = stats.mean().expect("count > 0");
        let std = stats.std_dev().expect("count > 0");
        let deviation = (x - mean).abs();
        let flagged = if std > 0.0 {
            deviation > params.threshold * std
        } else {
            x != mean
        };
        if flagged {
            findings.push(Finding::value(
                vector.sequence_index,
                &attr.name,
                ErrorType::Outlier,
                format!("value {} deviates {deviation} from running mean {mean}", value.render()),
            ));
        }
    }
    Ok(findings)
}
