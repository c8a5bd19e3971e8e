//! Stream data model: attribute values, data vectors, schemas and the
//! declarative constraints (types, intervals, uniqueness, keys, functional
//! dependencies, missing-value markers, cadence) that the cleaning modules
//! enforce.
//!
//! A stream is an ordered, unbounded sequence of fixed-schema [`DataVector`]s,
//! each carrying an arrival timestamp. Everything here is immutable after
//! construction; operations are pure functions.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};

use crate::error::{Error, Result};

/// UTC instant with millisecond precision, stored as epoch milliseconds.
///
/// Millisecond precision keeps ordering comparisons total and cheap; parsing
/// and formatting go through chrono at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instant(i64);

impl Instant {
    pub const fn from_millis(ms: i64) -> Self {
        Instant(ms)
    }

    pub const fn millis(self) -> i64 {
        self.0
    }

    pub fn plus_millis(self, ms: i64) -> Self {
        Instant(self.0 + ms)
    }

    /// Parse the formats the ingestion layer accepts without fixups:
    /// RFC 3339 (`2022-03-01T12:00:00.000Z`), `YYYY-MM-DD HH:MM:SS[.fff]`
    /// (taken as UTC) and a bare `YYYY-MM-DD` date (midnight UTC).
    pub fn parse(s: &str) -> Option<Instant> {
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Some(Instant(dt.with_timezone(&Utc).timestamp_millis()));
        }
        for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Instant(naive.and_utc().timestamp_millis()));
            }
        }
        if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            let naive = date.and_hms_opt(0, 0, 0)?;
            return Some(Instant(naive.and_utc().timestamp_millis()));
        }
        None
    }

    /// Additional lenient formats used by the type-repair fixups: day-first
    /// and compact (`YYYYMMDD`) date forms.
    pub fn parse_with_fixups(s: &str) -> Option<Instant> {
        if let Some(t) = Instant::parse(s) {
            return Some(t);
        }
        for fmt in ["%d.%m.%Y %H:%M:%S", "%d/%m/%Y %H:%M:%S", "%Y%m%d%H%M%S"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Instant(naive.and_utc().timestamp_millis()));
            }
        }
        for fmt in ["%d.%m.%Y", "%d/%m/%Y", "%Y%m%d"] {
            if let Ok(date) = NaiveDate::parse_from_str(s, fmt) {
                let naive = date.and_hms_opt(0, 0, 0)?;
                return Some(Instant(naive.and_utc().timestamp_millis()));
            }
        }
        None
    }

    /// Canonical rendering: RFC 3339 with exactly three fractional digits.
    pub fn render(self) -> String {
        match Utc.timestamp_millis_opt(self.0).single() {
            Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
            None => format!("@{}ms", self.0),
        }
    }
}

impl fmt::Display for Instant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The declared type of a schema attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Integer,
    Float,
    Text,
    Boolean,
    Instant,
}

impl AttributeKind {
    pub fn name(self) -> &'static str {
        match self {
            AttributeKind::Integer => "integer",
            AttributeKind::Float => "float",
            AttributeKind::Text => "text",
            AttributeKind::Boolean => "boolean",
            AttributeKind::Instant => "instant",
        }
    }

    /// Kinds with a meaningful numeric view (running statistics, intervals
    /// with numeric bounds, z-scores).
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            AttributeKind::Integer | AttributeKind::Float | AttributeKind::Instant
        )
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One cell of a data vector. Exactly one variant is active; `Null` is
/// representable for any attribute unless the schema forbids it.
#[derive(Debug, Clone)]
pub enum AttributeValue {
    Integer(i64),
    Float(f64),
    Text(String),
    Boolean(bool),
    Instant(Instant),
    Null,
}

/// Bit pattern for floats in equality/hashing: collapses -0.0 to 0.0 and all
/// NaNs to one pattern so values behave as plain map/set keys.
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else if x.is_nan() {
        f64::NAN.to_bits()
    } else {
        x.to_bits()
    }
}

impl PartialEq for AttributeValue {
    fn eq(&self, other: &Self) -> bool {
        use AttributeValue::*;
        match (self, other) {
            (Integer(a), Integer(b)) => a == b,
            (Float(a), Float(b)) => canonical_bits(*a) == canonical_bits(*b),
            (Text(a), Text(b)) => a == b,
            (Boolean(a), Boolean(b)) => a == b,
            (Instant(a), Instant(b)) => a == b,
            (Null, Null) => true,
            _ => false,
        }
    }
}

impl Eq for AttributeValue {}

impl Hash for AttributeValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        use AttributeValue::*;
        match self {
            Integer(a) => (0u8, a).hash(state),
            Float(a) => (1u8, canonical_bits(*a)).hash(state),
            Text(a) => (2u8, a).hash(state),
            Boolean(a) => (3u8, a).hash(state),
            Instant(a) => (4u8, a).hash(state),
            Null => 5u8.hash(state),
        }
    }
}

impl Ord for AttributeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use AttributeValue::*;
        fn rank(v: &AttributeValue) -> u8 {
            match v {
                Null => 0,
                Boolean(_) => 1,
                Integer(_) => 2,
                Float(_) => 3,
                Instant(_) => 4,
                Text(_) => 5,
            }
        }
        match (self, other) {
            (Integer(a), Integer(b)) => a.cmp(b),
            (Float(a), Float(b)) => f64::from_bits(canonical_bits(*a))
                .total_cmp(&f64::from_bits(canonical_bits(*b))),
            (Text(a), Text(b)) => a.cmp(b),
            (Boolean(a), Boolean(b)) => a.cmp(b),
            (Instant(a), Instant(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for AttributeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AttributeValue {
    pub fn is_null(&self) -> bool {
        matches!(self, AttributeValue::Null)
    }

    /// The active variant's kind; `None` for null.
    pub fn kind(&self) -> Option<AttributeKind> {
        match self {
            AttributeValue::Integer(_) => Some(AttributeKind::Integer),
            AttributeValue::Float(_) => Some(AttributeKind::Float),
            AttributeValue::Text(_) => Some(AttributeKind::Text),
            AttributeValue::Boolean(_) => Some(AttributeKind::Boolean),
            AttributeValue::Instant(_) => Some(AttributeKind::Instant),
            AttributeValue::Null => None,
        }
    }

    /// Numeric view: integers and floats as-is, instants as epoch milliseconds.
    pub fn as_numeric(&self) -> Option<f64> {
        match self {
            AttributeValue::Integer(i) => Some(*i as f64),
            AttributeValue::Float(f) => Some(*f),
            AttributeValue::Instant(t) => Some(t.millis() as f64),
            _ => None,
        }
    }

    /// Build a value of the given kind from a numeric quantity, rounding for
    /// integers and truncating instants to whole milliseconds.
    pub fn from_numeric(kind: AttributeKind, x: f64) -> Option<AttributeValue> {
        match kind {
            AttributeKind::Integer => Some(AttributeValue::Integer(x.round() as i64)),
            AttributeKind::Float => Some(AttributeValue::Float(x)),
            AttributeKind::Instant => {
                Some(AttributeValue::Instant(Instant::from_millis(x.round() as i64)))
            }
            _ => None,
        }
    }

    /// Canonical text rendering; nulls render as the empty string.
    pub fn render(&self) -> String {
        match self {
            AttributeValue::Integer(i) => i.to_string(),
            AttributeValue::Float(f) => format!("{f}"),
            AttributeValue::Text(s) => s.clone(),
            AttributeValue::Boolean(b) => b.to_string(),
            AttributeValue::Instant(t) => t.render(),
            AttributeValue::Null => String::new(),
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// One timestamped record of a stream. `sequence_index` increases by one along
/// a stream and `arrival` is non-decreasing; the pipeline enforces both.
#[derive(Debug, Clone, PartialEq)]
pub struct DataVector {
    pub sequence_index: u64,
    pub arrival: Instant,
    pub values: Vec<AttributeValue>,
}

impl DataVector {
    pub fn new(sequence_index: u64, arrival: Instant, values: Vec<AttributeValue>) -> Self {
        DataVector {
            sequence_index,
            arrival,
            values,
        }
    }
}

/// Permissible values for an attribute: a finite set or a bounded range.
///
/// Continuous bounds are held in the attribute's numeric view (instants as
/// epoch milliseconds), so one representation covers integer, float and
/// instant attributes.
#[derive(Debug, Clone, PartialEq)]
pub enum IntervalConstraint {
    Discrete(BTreeSet<AttributeValue>),
    Continuous {
        lo: f64,
        hi: f64,
        lo_inclusive: bool,
        hi_inclusive: bool,
    },
}

impl IntervalConstraint {
    pub fn inclusive(lo: f64, hi: f64) -> Self {
        IntervalConstraint::Continuous {
            lo,
            hi,
            lo_inclusive: true,
            hi_inclusive: true,
        }
    }

    pub fn discrete<I: IntoIterator<Item = AttributeValue>>(allowed: I) -> Self {
        IntervalConstraint::Discrete(allowed.into_iter().collect())
    }

    /// Whether a (non-null, kind-matching) value satisfies the constraint.
    pub fn contains(&self, value: &AttributeValue) -> bool {
        match self {
            IntervalConstraint::Discrete(set) => set.contains(value),
            IntervalConstraint::Continuous {
                lo,
                hi,
                lo_inclusive,
                hi_inclusive,
            } => match value.as_numeric() {
                Some(x) => {
                    let above = if *lo_inclusive { x >= *lo } else { x > *lo };
                    let below = if *hi_inclusive { x <= *hi } else { x < *hi };
                    above && below
                }
                None => false,
            },
        }
    }
}

/// What to do when a functional dependency meets a determinant tuple that has
/// no rule yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownTuplePolicy {
    /// Unknown tuples are not findings.
    Ignore,
    /// The first committed vector carrying the tuple defines the rule from
    /// then on.
    LearnFirstSeen,
    /// Unknown tuples are findings.
    Reject,
}

/// A functional dependency given as an explicit lookup table from determinant
/// value tuples to the single permitted dependent value.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDependency {
    pub determinant: Vec<String>,
    pub dependent: String,
    pub mapping: std::collections::BTreeMap<Vec<AttributeValue>, AttributeValue>,
    pub unknown_policy: UnknownTuplePolicy,
}

impl FunctionalDependency {
    /// Short display form, e.g. `{RatecodeID} -> mta_tax`.
    pub fn label(&self) -> String {
        format!("{{{}}} -> {}", self.determinant.join(","), self.dependent)
    }
}

/// One attribute of the stream schema.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaAttribute {
    pub name: String,
    pub declared_type: AttributeKind,
    pub nullable: bool,
    pub unique: bool,
    pub key_member: bool,
    pub interval: Option<IntervalConstraint>,
    /// Surface encodings treated as missing, matched against the raw text
    /// before type conversion (so a `-9999` float and the text `-9999` both
    /// match).
    pub missing_markers: BTreeSet<String>,
}

impl SchemaAttribute {
    pub fn new(name: impl Into<String>, declared_type: AttributeKind) -> Self {
        SchemaAttribute {
            name: name.into(),
            declared_type,
            nullable: true,
            unique: false,
            key_member: false,
            interval: None,
            missing_markers: BTreeSet::new(),
        }
    }

    pub fn not_null(mut self) -> Self {
        self.nullable = false;
        self
    }

    pub fn unique_key(mut self) -> Self {
        self.unique = true;
        self.key_member = true;
        self.nullable = false;
        self
    }

    pub fn with_interval(mut self, interval: IntervalConstraint) -> Self {
        self.interval = Some(interval);
        self
    }

    pub fn with_markers<I, S>(mut self, markers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.missing_markers = markers.into_iter().map(Into::into).collect();
        self
    }
}

/// A fault in a schema definition. Faults are data, not failures: a schema
/// with faults can be inspected, it just cannot drive a pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaFault {
    /// The attribute or rule at fault.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for SchemaFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// Attribute list plus all declarative constraints of a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub attributes: Vec<SchemaAttribute>,
    pub functional_dependencies: Vec<FunctionalDependency>,
    /// Expected spacing between consecutive vectors, for time-series streams.
    pub expected_cadence_ms: Option<i64>,
    /// Non-key attributes that must be single-valued per key.
    pub contradiction_scope: BTreeSet<String>,
    /// Attribute whose value doubles as the stream arrival time when reading
    /// a stream from a file.
    pub arrival_attribute: Option<String>,
}

impl Schema {
    pub fn new(attributes: Vec<SchemaAttribute>) -> Self {
        Schema {
            attributes,
            functional_dependencies: Vec::new(),
            expected_cadence_ms: None,
            contradiction_scope: BTreeSet::new(),
            arrival_attribute: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attr_name(&self, index: usize) -> &str {
        &self.attributes[index].name
    }

    /// Indices of the key attributes (in schema order).
    pub fn key_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.key_member)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the attributes under a uniqueness requirement.
    pub fn unique_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.unique)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the contradiction-scope attributes (in schema order).
    pub fn scope_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| self.contradiction_scope.contains(&a.name))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn numeric_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.declared_type.is_numeric())
            .map(|(i, _)| i)
            .collect()
    }

    /// Check every schema invariant; an empty list means the schema is
    /// well-formed. Each fault names the offending attribute or rule.
    pub fn validate(&self) -> Vec<SchemaFault> {
        let mut faults = Vec::new();
        let mut seen = HashSet::new();
        for attr in &self.attributes {
            if !seen.insert(attr.name.as_str()) {
                faults.push(SchemaFault {
                    subject: attr.name.clone(),
                    message: "duplicate attribute name".into(),
                });
            }
            if let Some(IntervalConstraint::Discrete(set)) = &attr.interval {
                if set.is_empty() {
                    faults.push(SchemaFault {
                        subject: attr.name.clone(),
                        message: "discrete interval has no allowed values".into(),
                    });
                }
                for v in set {
                    if v.kind() != Some(attr.declared_type) {
                        faults.push(SchemaFault {
                            subject: attr.name.clone(),
                            message: format!(
                                "allowed value {v:?} does not match declared type {}",
                                attr.declared_type
                            ),
                        });
                    }
                }
            }
            if let Some(IntervalConstraint::Continuous { lo, hi, .. }) = &attr.interval {
                if lo > hi {
                    faults.push(SchemaFault {
                        subject: attr.name.clone(),
                        message: format!("interval lower bound {lo} exceeds upper bound {hi}"),
                    });
                }
                if !attr.declared_type.is_numeric() {
                    faults.push(SchemaFault {
                        subject: attr.name.clone(),
                        message: "continuous interval on a non-numeric attribute".into(),
                    });
                }
            }
        }
        for fd in &self.functional_dependencies {
            let label = fd.label();
            if fd.determinant.is_empty() {
                faults.push(SchemaFault {
                    subject: label.clone(),
                    message: "empty determinant".into(),
                });
            }
            if fd.determinant.contains(&fd.dependent) {
                faults.push(SchemaFault {
                    subject: label.clone(),
                    message: "dependent attribute is part of the determinant".into(),
                });
            }
            for name in fd.determinant.iter().chain(std::iter::once(&fd.dependent)) {
                if self.attr_index(name).is_none() {
                    faults.push(SchemaFault {
                        subject: label.clone(),
                        message: format!("unknown attribute {name}"),
                    });
                }
            }
            for tuple in fd.mapping.keys() {
                if tuple.len() != fd.determinant.len() {
                    faults.push(SchemaFault {
                        subject: label.clone(),
                        message: "rule tuple arity differs from determinant arity".into(),
                    });
                }
            }
        }
        if let Some(cadence) = self.expected_cadence_ms {
            if cadence <= 0 {
                faults.push(SchemaFault {
                    subject: "expected_cadence".into(),
                    message: "cadence must be positive".into(),
                });
            }
        }
        for name in &self.contradiction_scope {
            match self.attr_index(name) {
                None => faults.push(SchemaFault {
                    subject: name.clone(),
                    message: "contradiction scope names an unknown attribute".into(),
                }),
                Some(i) if self.attributes[i].key_member => faults.push(SchemaFault {
                    subject: name.clone(),
                    message: "contradiction scope must not contain key attributes".into(),
                }),
                _ => {}
            }
        }
        if let Some(name) = &self.arrival_attribute {
            match self.attr_index(name) {
                None => faults.push(SchemaFault {
                    subject: name.clone(),
                    message: "arrival attribute is not in the schema".into(),
                }),
                Some(i) if self.attributes[i].declared_type != AttributeKind::Instant => {
                    faults.push(SchemaFault {
                        subject: name.clone(),
                        message: "arrival attribute must be an instant".into(),
                    })
                }
                _ => {}
            }
        }
        faults
    }
}

/// Convert one raw text field into a typed value without fixups.
///
/// Returns `None` for unconvertible tokens; the caller carries those as text
/// for the schema-check stage.
fn convert_strict(raw: &str, kind: AttributeKind) -> Option<AttributeValue> {
    let t = raw.trim();
    match kind {
        AttributeKind::Integer => t.parse::<i64>().ok().map(AttributeValue::Integer),
        AttributeKind::Float => match t.parse::<f64>() {
            Ok(f) if f.is_finite() => Some(AttributeValue::Float(f)),
            _ => None,
        },
        AttributeKind::Boolean => match t {
            "true" => Some(AttributeValue::Boolean(true)),
            "false" => Some(AttributeValue::Boolean(false)),
            _ => None,
        },
        AttributeKind::Instant => Instant::parse(t).map(AttributeValue::Instant),
        AttributeKind::Text => Some(AttributeValue::Text(raw.to_string())),
    }
}

/// Normalize decimal-comma and thousands-separator forms to a plain float
/// token: if both `.` and `,` occur the rightmost acts as the decimal point;
/// a single `,` is a decimal point; repeated separators are grouping.
fn normalize_decimal(s: &str) -> String {
    let s: String = s.chars().filter(|c| *c != ' ' && *c != '_').collect();
    let dots = s.matches('.').count();
    let commas = s.matches(',').count();
    if dots > 0 && commas > 0 {
        let last_dot = s.rfind('.').unwrap();
        let last_comma = s.rfind(',').unwrap();
        let (decimal, grouping) = if last_dot > last_comma {
            ('.', ',')
        } else {
            (',', '.')
        };
        s.chars()
            .filter(|c| *c != grouping)
            .map(|c| if c == decimal { '.' } else { c })
            .collect()
    } else if commas == 1 {
        s.replace(',', ".")
    } else if commas > 1 {
        s.replace(',', "")
    } else if dots > 1 {
        s.replace('.', "")
    } else {
        s
    }
}

/// Lenient conversion used by the `convert_with_fixups` type-repair strategy:
/// decimal commas, thousands separators, integer-valued floats, day-first and
/// compact date forms, and common boolean spellings.
pub(crate) fn convert_with_fixups(raw: &str, kind: AttributeKind) -> Option<AttributeValue> {
    if let Some(v) = convert_strict(raw, kind) {
        return Some(v);
    }
    let t = raw.trim();
    match kind {
        AttributeKind::Float => match normalize_decimal(t).parse::<f64>() {
            Ok(f) if f.is_finite() => Some(AttributeValue::Float(f)),
            _ => None,
        },
        AttributeKind::Integer => {
            let norm = normalize_decimal(t);
            if let Ok(i) = norm.parse::<i64>() {
                return Some(AttributeValue::Integer(i));
            }
            match norm.parse::<f64>() {
                Ok(f) if f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15 => {
                    Some(AttributeValue::Integer(f as i64))
                }
                _ => None,
            }
        }
        AttributeKind::Boolean => match t.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Some(AttributeValue::Boolean(true)),
            "false" | "no" | "0" => Some(AttributeValue::Boolean(false)),
            _ => None,
        },
        AttributeKind::Instant => Instant::parse_with_fixups(t).map(AttributeValue::Instant),
        AttributeKind::Text => Some(AttributeValue::Text(raw.to_string())),
    }
}

/// Convert raw text fields into a [`DataVector`].
///
/// Fields matching one of the attribute's missing markers, or empty fields,
/// become null. Unconvertible fields are carried as text so the schema-check
/// stage can flag and repair them; this never fails on well-arity input.
pub fn parse_vector(
    raw: &[impl AsRef<str>],
    schema: &Schema,
    sequence_index: u64,
    arrival: Instant,
) -> Result<DataVector> {
    if raw.len() != schema.arity() {
        return Err(Error::ArityMismatch {
            expected: schema.arity(),
            actual: raw.len(),
        });
    }
    let values = raw
        .iter()
        .zip(&schema.attributes)
        .map(|(field, attr)| {
            let field = field.as_ref();
            let trimmed = field.trim();
            if trimmed.is_empty() || attr.missing_markers.contains(trimmed) {
                AttributeValue::Null
            } else {
                convert_strict(field, attr.declared_type)
                    .unwrap_or_else(|| AttributeValue::Text(field.to_string()))
            }
        })
        .collect();
    Ok(DataVector::new(sequence_index, arrival, values))
}

/// Render a vector back into text fields (inverse of [`parse_vector`] for
/// cleanly converted canonical fields).
pub fn serialize_vector(vector: &DataVector) -> Vec<String> {
    vector.values.iter().map(AttributeValue::render).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_float_schema() -> Schema {
        Schema::new(vec![
            SchemaAttribute::new("a", AttributeKind::Float).with_markers(["-9999"]),
            SchemaAttribute::new("b", AttributeKind::Float),
        ])
    }

    #[test]
    fn parse_converts_clean_fields() {
        let schema = two_float_schema();
        let v = parse_vector(&["22.5", "45.1"], &schema, 1, Instant::from_millis(0)).unwrap();
        assert_eq!(v.values[0], AttributeValue::Float(22.5));
        assert_eq!(v.values[1], AttributeValue::Float(45.1));
    }

    #[test]
    fn parse_maps_missing_markers_to_null() {
        let schema = two_float_schema();
        let v = parse_vector(&["-9999", "45.1"], &schema, 1, Instant::from_millis(0)).unwrap();
        assert!(v.values[0].is_null());
        assert_eq!(v.values[1], AttributeValue::Float(45.1));
    }

    #[test]
    fn parse_carries_unconvertible_fields_as_text() {
        let schema = two_float_schema();
        let v = parse_vector(&["abc", "45.1"], &schema, 1, Instant::from_millis(0)).unwrap();
        assert_eq!(v.values[0], AttributeValue::Text("abc".into()));
    }

    #[test]
    fn parse_rejects_arity_mismatch() {
        let schema = two_float_schema();
        let err = parse_vector(&["1.0"], &schema, 1, Instant::from_millis(0)).unwrap_err();
        match err {
            Error::ArityMismatch { expected, actual } => {
                assert_eq!((expected, actual), (2, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validate_accepts_well_formed_schema() {
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("id", AttributeKind::Integer).unique_key(),
            SchemaAttribute::new("temp", AttributeKind::Float)
                .with_interval(IntervalConstraint::inclusive(0.0, 100.0)),
            SchemaAttribute::new("mode", AttributeKind::Text),
            SchemaAttribute::new("flag", AttributeKind::Boolean),
            SchemaAttribute::new("at", AttributeKind::Instant),
        ]);
        schema.contradiction_scope = ["temp".to_string()].into_iter().collect();
        assert!(schema.validate().is_empty());
    }

    #[test]
    fn validate_flags_duplicate_attribute_name() {
        let schema = Schema::new(vec![
            SchemaAttribute::new("temp", AttributeKind::Float),
            SchemaAttribute::new("temp", AttributeKind::Float),
        ]);
        let faults = schema.validate();
        assert_eq!(faults.len(), 1);
        assert_eq!(faults[0].subject, "temp");
    }

    #[test]
    fn validate_flags_dependent_inside_determinant() {
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("a", AttributeKind::Integer),
            SchemaAttribute::new("b", AttributeKind::Integer),
        ]);
        schema.functional_dependencies.push(FunctionalDependency {
            determinant: vec!["a".into(), "b".into()],
            dependent: "b".into(),
            mapping: Default::default(),
            unknown_policy: UnknownTuplePolicy::Ignore,
        });
        let faults = schema.validate();
        assert_eq!(faults.len(), 1);
        assert!(faults[0].subject.contains("-> b"));
    }

    #[test]
    fn fixups_recover_decimal_comma_and_grouping() {
        assert_eq!(
            convert_with_fixups("3,14", AttributeKind::Float),
            Some(AttributeValue::Float(3.14))
        );
        assert_eq!(
            convert_with_fixups("1.234,56", AttributeKind::Float),
            Some(AttributeValue::Float(1234.56))
        );
        assert_eq!(
            convert_with_fixups("1,234.5", AttributeKind::Float),
            Some(AttributeValue::Float(1234.5))
        );
        assert_eq!(
            convert_with_fixups("42.0", AttributeKind::Integer),
            Some(AttributeValue::Integer(42))
        );
        assert_eq!(convert_with_fixups("abc", AttributeKind::Float), None);
    }

    #[test]
    fn fixups_recover_date_forms() {
        let expected = Instant::parse("2019-03-22 00:00:00").unwrap();
        assert_eq!(
            convert_with_fixups("20190322", AttributeKind::Instant),
            Some(AttributeValue::Instant(expected))
        );
        assert_eq!(
            convert_with_fixups("22.03.2019", AttributeKind::Instant),
            Some(AttributeValue::Instant(expected))
        );
    }

    #[test]
    fn instant_rendering_round_trips() {
        let t = Instant::parse("2022-03-01T12:00:00.250Z").unwrap();
        assert_eq!(Instant::parse(&t.render()), Some(t));
    }

    #[test]
    fn float_equality_is_canonical() {
        assert_eq!(AttributeValue::Float(0.0), AttributeValue::Float(-0.0));
        assert_ne!(AttributeValue::Float(1.0), AttributeValue::Integer(1));
    }
}
