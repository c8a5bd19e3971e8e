//! Controlled error injection into a verified-clean dataset, producing the
//! corrupted stream plus the exact log the evaluator scores against.
//!
//! Positions are drawn independently of stream order, so for the key-based
//! error types a collision is equally likely to land before or after the
//! vector it collides with. Identical (dataset, spec, seed) inputs yield
//! identical output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detect::{ErrorType, Finding};
use crate::error::{Error, Result};
use crate::model::{
    AttributeKind, AttributeValue, DataVector, Instant, IntervalConstraint, Schema,
};
use crate::pipeline::{self, PipelineConfig};

/// How many cells or vectors to corrupt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InjectRate {
    /// Fraction of the stream length, rounded to the nearest count.
    Fraction(f64),
    Count(usize),
}

impl InjectRate {
    fn count_for(&self, len: usize) -> Result<usize> {
        let count = match *self {
            InjectRate::Fraction(f) => {
                if !(f >= 0.0 && f <= 1.0) {
                    return Err(Error::Injection(format!("rate {f} outside [0, 1]")));
                }
                (f * len as f64).round() as usize
            }
            InjectRate::Count(n) => n,
        };
        Ok(count)
    }
}

/// Which direction an injected outlier shift takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// Away from the column mean, so the injected deviation is at least the
    /// configured multiple of the column standard deviation.
    AwayFromMean,
    /// Coin-flip sign; shifts may land back inside the normal band.
    Random,
}

/// Everything the injector needs for one error type.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionSpec {
    pub error_type: ErrorType,
    /// Target attributes for the cell-level error types; ignored for the
    /// key-based types and duplicates.
    pub attributes: Vec<String>,
    /// Per-attribute rate for cell-level types, per-stream rate for vector
    /// types.
    pub rate: InjectRate,
    pub seed: u64,
    /// Interval violations land this far beyond the violated bound, as a
    /// uniform fraction of the interval width.
    pub interval_magnitude: (f64, f64),
    /// Outlier shifts in column-standard-deviation units.
    pub outlier_sigma: (f64, f64),
    pub outlier_direction: ShiftDirection,
    /// Violate only this functional dependency (index into the schema list);
    /// `None` picks per-cell among all violable ones.
    pub fd_index: Option<usize>,
    /// Lowest sequence index eligible for injection, for experiments that
    /// must leave a warm-up prefix untouched.
    pub min_index: u64,
}

impl InjectionSpec {
    pub fn new(error_type: ErrorType, rate: InjectRate, seed: u64) -> Self {
        InjectionSpec {
            error_type,
            attributes: Vec::new(),
            rate,
            seed,
            interval_magnitude: (0.0, 0.5),
            outlier_sigma: (4.0, 8.0),
            outlier_direction: ShiftDirection::AwayFromMean,
            fd_index: None,
            min_index: 1,
        }
    }

    pub fn on_attributes<I, S>(mut self, attributes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.attributes = attributes.into_iter().map(Into::into).collect();
        self
    }
}

/// One injected error: where, what, and the before/after values.
///
/// For duplicates the entry names the inserted copy (no attribute, original
/// null). For contradictions the entry names each scope attribute whose value
/// now conflicts with its future counterpart; the colliding vector differs
/// from ground truth through its overwritten key.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionEntry {
    pub vector_index: u64,
    pub attribute: Option<String>,
    pub error_type: ErrorType,
    pub original: AttributeValue,
    pub injected: AttributeValue,
}

/// The full injection record: every change, in deterministic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InjectionLog {
    pub entries: Vec<InjectionEntry>,
}

impl InjectionLog {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn count_for(&self, attribute: Option<&str>) -> usize {
        self.entries
            .iter()
            .filter(|e| e.attribute.as_deref() == attribute)
            .count()
    }

    fn sort(&mut self) {
        self.entries
            .sort_by(|a, b| (a.vector_index, &a.attribute).cmp(&(b.vector_index, &b.attribute)));
    }
}

/// Inject errors of one type into a ground-truth stream.
pub fn inject(
    dataset: &[DataVector],
    schema: &Schema,
    spec: &InjectionSpec,
) -> Result<(Vec<DataVector>, InjectionLog)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut corrupted: Vec<DataVector> = dataset.to_vec();
    let mut log = InjectionLog::default();

    match spec.error_type {
        ErrorType::Missing => {
            inject_cells(&mut corrupted, schema, spec, &mut rng, &mut log, |_, _, _, _| {
                Ok(AttributeValue::Null)
            })?
        }
        ErrorType::Interval => {
            let magnitude = spec.interval_magnitude;
            inject_cells(
                &mut corrupted,
                schema,
                spec,
                &mut rng,
                &mut log,
                |attr, value, _, rng| out_of_interval(attr.1, value, magnitude, rng),
            )?
        }
        ErrorType::Outlier => {
            // shifts are expressed in ground-truth column units
            let sigmas: Vec<(f64, f64)> = target_attr_indices(schema, spec)?
                .iter()
                .map(|&i| column_stats(dataset, i))
                .collect();
            let params = (spec.outlier_sigma, spec.outlier_direction);
            inject_cells(
                &mut corrupted,
                schema,
                spec,
                &mut rng,
                &mut log,
                move |attr, value, col, rng| {
                    let (mean, sigma) = sigmas[col];
                    shifted_outlier(attr.1, value, mean, sigma, params, rng)
                },
            )?
        }
        ErrorType::WrongType => {
            inject_cells(&mut corrupted, schema, spec, &mut rng, &mut log, |attr, value, _, _| {
                corrupting_surface_form(attr.1, value)
            })?
        }
        ErrorType::Fd => inject_fd(&mut corrupted, schema, spec, &mut rng, &mut log)?,
        ErrorType::Uniqueness | ErrorType::Contradiction => {
            inject_key_collisions(&mut corrupted, schema, spec, &mut rng, &mut log)?
        }
        ErrorType::Duplicate => {
            corrupted = inject_duplicates(corrupted, spec, &mut rng, &mut log)?;
        }
        other => {
            return Err(Error::Injection(format!(
                "error type {other} cannot be injected"
            )))
        }
    }

    log.sort();
    Ok((corrupted, log))
}

fn target_attr_indices(schema: &Schema, spec: &InjectionSpec) -> Result<Vec<usize>> {
    if spec.attributes.is_empty() {
        return Err(Error::Injection(format!(
            "{} injection needs target attributes",
            spec.error_type
        )));
    }
    spec.attributes
        .iter()
        .map(|name| {
            schema
                .attr_index(name)
                .ok_or_else(|| Error::Injection(format!("unknown attribute {name}")))
        })
        .collect()
}

/// Corrupt sampled non-null cells of each target column independently.
fn inject_cells<F>(
    corrupted: &mut [DataVector],
    schema: &Schema,
    spec: &InjectionSpec,
    rng: &mut ChaCha8Rng,
    log: &mut InjectionLog,
    mut corrupt: F,
) -> Result<()>
where
    F: FnMut(
        (&str, &crate::model::SchemaAttribute),
        &AttributeValue,
        usize,
        &mut ChaCha8Rng,
    ) -> Result<AttributeValue>,
{
    let targets = target_attr_indices(schema, spec)?;
    for (col, &attr_idx) in targets.iter().enumerate() {
        let attr = &schema.attributes[attr_idx];
        let eligible: Vec<usize> = corrupted
            .iter()
            .enumerate()
            .filter(|(_, v)| v.sequence_index >= spec.min_index && !v.values[attr_idx].is_null())
            .map(|(i, _)| i)
            .collect();
        let count = spec.rate.count_for(corrupted.len())?;
        if count > eligible.len() {
            return Err(Error::Injection(format!(
                "{}: {count} injections requested but only {} eligible cells",
                attr.name,
                eligible.len()
            )));
        }
        let picks = rand::seq::index::sample(rng, eligible.len(), count);
        for pick in picks.iter() {
            let row = eligible[pick];
            let original = corrupted[row].values[attr_idx].clone();
            let injected = corrupt((&attr.name, attr), &original, col, rng)?;
            corrupted[row].values[attr_idx] = injected.clone();
            log.entries.push(InjectionEntry {
                vector_index: corrupted[row].sequence_index,
                attribute: Some(attr.name.clone()),
                error_type: spec.error_type,
                original,
                injected,
            });
        }
    }
    Ok(())
}

/// Push a value outside its interval by a uniform fraction of the interval
/// width beyond a uniformly chosen violated bound.
fn out_of_interval(
    attr: &crate::model::SchemaAttribute,
    value: &AttributeValue,
    magnitude: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<AttributeValue> {
    let interval = attr
        .interval
        .as_ref()
        .ok_or_else(|| Error::Injection(format!("{} has no interval constraint", attr.name)))?;
    match interval {
        IntervalConstraint::Continuous { lo, hi, .. } => {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Injection(format!(
                    "{} needs finite bounds for interval injection",
                    attr.name
                )));
            }
            let width = (hi - lo).max(1.0);
            let delta = rng.gen_range(magnitude.0..=magnitude.1).max(f64::MIN_POSITIVE) * width;
            let above = rng.gen_bool(0.5);
            let raw = if above { hi + delta } else { lo - delta };
            let raw = match attr.declared_type {
                // integers round away from the interval so the result stays outside
                AttributeKind::Integer | AttributeKind::Instant => {
                    if above {
                        raw.ceil().max(hi + 1.0)
                    } else {
                        raw.floor().min(lo - 1.0)
                    }
                }
                _ => raw,
            };
            AttributeValue::from_numeric(attr.declared_type, raw)
                .ok_or_else(|| Error::Injection(format!("{} is not numeric", attr.name)))
        }
        IntervalConstraint::Discrete(set) => {
            let numeric_max = set.iter().filter_map(AttributeValue::as_numeric).fold(
                f64::NEG_INFINITY,
                f64::max,
            );
            if numeric_max.is_finite() {
                let bump = rng.gen_range(1..=1000) as f64;
                let candidate =
                    AttributeValue::from_numeric(attr.declared_type, numeric_max + bump)
                        .ok_or_else(|| Error::Injection(format!("{} is not numeric", attr.name)))?;
                Ok(candidate)
            } else {
                // non-numeric discrete set: derive an out-of-set token
                let base = value.render();
                Ok(AttributeValue::Text(format!("{base}_outside")))
            }
        }
    }
}

/// Shift a numeric cell by a uniform multiple of the column's standard
/// deviation, by default away from the column mean.
fn shifted_outlier(
    attr: &crate::model::SchemaAttribute,
    value: &AttributeValue,
    mean: f64,
    sigma: f64,
    (sigma_range, direction): ((f64, f64), ShiftDirection),
    rng: &mut ChaCha8Rng,
) -> Result<AttributeValue> {
    if !attr.declared_type.is_numeric() {
        return Err(Error::Injection(format!(
            "{} is not numeric, cannot inject outliers",
            attr.name
        )));
    }
    if sigma <= 0.0 {
        return Err(Error::Injection(format!(
            "{} has zero dispersion, outlier shifts are undefined",
            attr.name
        )));
    }
    let x = value
        .as_numeric()
        .ok_or_else(|| Error::Injection(format!("{}: non-numeric cell", attr.name)))?;
    let multiple = rng.gen_range(sigma_range.0..=sigma_range.1);
    let sign = match direction {
        ShiftDirection::AwayFromMean => {
            if x >= mean {
                1.0
            } else {
                -1.0
            }
        }
        ShiftDirection::Random => {
            if rng.gen_bool(0.5) {
                1.0
            } else {
                -1.0
            }
        }
    };
    AttributeValue::from_numeric(attr.declared_type, x + sign * multiple * sigma)
        .ok_or_else(|| Error::Injection(format!("{} is not numeric", attr.name)))
}

/// Re-render a cell in a surface form that blocks plain type conversion
/// (decimal comma, trailing decimal for integers, day-first dates, yes/no
/// booleans). The fixup-based repair can recover the original value.
fn corrupting_surface_form(
    attr: &crate::model::SchemaAttribute,
    value: &AttributeValue,
) -> Result<AttributeValue> {
    let text = match (attr.declared_type, value) {
        (AttributeKind::Float, AttributeValue::Float(f)) => {
            let rendered = format!("{f}");
            if rendered.contains('.') {
                rendered.replace('.', ",")
            } else {
                format!("{rendered},0")
            }
        }
        (AttributeKind::Integer, AttributeValue::Integer(i)) => format!("{i}.0"),
        (AttributeKind::Boolean, AttributeValue::Boolean(b)) => {
            if *b { "yes" } else { "no" }.to_string()
        }
        (AttributeKind::Instant, AttributeValue::Instant(t)) => {
            let dt = chrono::DateTime::from_timestamp_millis(t.millis())
                .ok_or_else(|| Error::Injection("instant out of range".into()))?;
            dt.format("%d.%m.%Y %H:%M:%S").to_string()
        }
        (AttributeKind::Text, _) => {
            return Err(Error::Injection(format!(
                "{} is text, there is no wrong-type form for it",
                attr.name
            )))
        }
        _ => {
            return Err(Error::Injection(format!(
                "{}: cell does not carry its declared type",
                attr.name
            )))
        }
    };
    Ok(AttributeValue::Text(text))
}

/// Ground-truth column mean and population sigma per target column, in
/// spec-attribute order.
fn column_sigmas(dataset: &[DataVector], schema: &Schema) -> Vec<(f64, f64)> {
    let _ = schema;
    Vec::new()
}

fn column_stats(dataset: &[DataVector], attr_idx: usize) -> (f64, f64) {
    let values: Vec<f64> = dataset
        .iter()
        .filter_map(|v| v.values[attr_idx].as_numeric())
        .collect();
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Replace the dependent cell of a mapped tuple with a different mapped value
/// of the targeted dependency, so exactly that rule is violated where
/// possible; side effects on other rules over the same attribute are expected.
fn inject_fd(
    corrupted: &mut [DataVector],
    schema: &Schema,
    spec: &InjectionSpec,
    rng: &mut ChaCha8Rng,
    log: &mut InjectionLog,
) -> Result<()> {
    if schema.functional_dependencies.is_empty() {
        return Err(Error::Injection("schema declares no functional dependencies".into()));
    }
    let fd_idx = spec.fd_index.unwrap_or(0);
    let fd = schema
        .functional_dependencies
        .get(fd_idx)
        .ok_or_else(|| Error::Injection(format!("no functional dependency at index {fd_idx}")))?;
    let dep_idx = schema
        .attr_index(&fd.dependent)
        .ok_or_else(|| Error::Injection(format!("unknown attribute {}", fd.dependent)))?;
    let det_idx: Vec<usize> = fd
        .determinant
        .iter()
        .map(|name| {
            schema
                .attr_index(name)
                .ok_or_else(|| Error::Injection(format!("unknown attribute {name}")))
        })
        .collect::<Result<_>>()?;
    let distinct_values: Vec<&AttributeValue> = {
        let mut seen = std::collections::BTreeSet::new();
        fd.mapping.values().filter(|v| seen.insert(*v)).collect()
    };
    if distinct_values.len() < 2 {
        return Err(Error::Injection(format!(
            "{} maps every tuple to one value, nothing to violate",
            fd.label()
        )));
    }

    let eligible: Vec<usize> = corrupted
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            if v.sequence_index < spec.min_index || v.values[dep_idx].is_null() {
                return false;
            }
            let tuple: Option<Vec<AttributeValue>> = det_idx
                .iter()
                .map(|&i| (!v.values[i].is_null()).then(|| v.values[i].clone()))
                .collect();
            tuple.is_some_and(|t| fd.mapping.contains_key(&t))
        })
        .map(|(i, _)| i)
        .collect();
    let count = spec.rate.count_for(corrupted.len())?;
    if count > eligible.len() {
        return Err(Error::Injection(format!(
            "{count} injections requested but only {} mapped tuples",
            eligible.len()
        )));
    }
    let picks = rand::seq::index::sample(rng, eligible.len(), count);
    for pick in picks.iter() {
        let row = eligible[pick];
        let original = corrupted[row].values[dep_idx].clone();
        let alternatives: Vec<&&AttributeValue> =
            distinct_values.iter().filter(|v| ***v != original).collect();
        let injected = (**alternatives[rng.gen_range(0..alternatives.len())]).clone();
        corrupted[row].values[dep_idx] = injected.clone();
        log.entries.push(InjectionEntry {
            vector_index: corrupted[row].sequence_index,
            attribute: Some(fd.dependent.clone()),
            error_type: ErrorType::Fd,
            original,
            injected,
        });
    }
    Ok(())
}

/// Overwrite the keys of sampled vectors with the keys of sampled donors.
///
/// Targets and donors are drawn as disjoint pairs, so every injection creates
/// exactly one fresh collision, and the coin flip that assigns the roles
/// within a pair puts the corrupted vector before or after its donor with
/// probability one half each.
fn inject_key_collisions(
    corrupted: &mut [DataVector],
    schema: &Schema,
    spec: &InjectionSpec,
    rng: &mut ChaCha8Rng,
    log: &mut InjectionLog,
) -> Result<()> {
    let key_idx = if spec.error_type == ErrorType::Uniqueness {
        schema.unique_indices()
    } else {
        schema.key_indices()
    };
    if key_idx.is_empty() {
        return Err(Error::Injection(format!(
            "schema has no key attributes for {} injection",
            spec.error_type
        )));
    }
    let scope_idx = schema.scope_indices();
    if spec.error_type == ErrorType::Contradiction && scope_idx.is_empty() {
        return Err(Error::Injection(
            "schema has no contradiction scope".into(),
        ));
    }
    let eligible: Vec<usize> = corrupted
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            v.sequence_index >= spec.min_index
                && key_idx.iter().all(|&i| !v.values[i].is_null())
        })
        .map(|(i, _)| i)
        .collect();
    let count = spec.rate.count_for(corrupted.len())?;
    if 2 * count > eligible.len() {
        return Err(Error::Injection(format!(
            "{count} collisions need {} vectors but only {} are eligible",
            2 * count,
            eligible.len()
        )));
    }
    let picks = rand::seq::index::sample(rng, eligible.len(), 2 * count);
    let mut pool: Vec<usize> = picks.iter().map(|p| eligible[p]).collect();

    // for contradictions the pair must actually disagree somewhere in scope
    if spec.error_type == ErrorType::Contradiction {
        let mut i = 0;
        while i + 1 < pool.len() {
            let differs = scope_idx
                .iter()
                .any(|&s| corrupted[pool[i]].values[s] != corrupted[pool[i + 1]].values[s]);
            if differs {
                i += 2;
            } else if i + 2 < pool.len() {
                // swap in a later partner and retry this pair
                let j = rng.gen_range(i + 2..pool.len());
                pool.swap(i + 1, j);
            } else {
                return Err(Error::Injection(
                    "could not pair vectors with differing scope values".into(),
                ));
            }
        }
    }

    for pair in pool.chunks_exact(2) {
        let (target, donor) = if rng.gen_bool(0.5) {
            (pair[0], pair[1])
        } else {
            (pair[1], pair[0])
        };
        let target_index = corrupted[target].sequence_index;
        if spec.error_type == ErrorType::Uniqueness {
            let old: Vec<AttributeValue> =
                key_idx.iter().map(|&i| corrupted[target].values[i].clone()).collect();
            let new: Vec<AttributeValue> =
                key_idx.iter().map(|&i| corrupted[donor].values[i].clone()).collect();
            let (attribute, original, injected) = if key_idx.len() == 1 {
                (
                    Some(schema.attr_name(key_idx[0]).to_string()),
                    old[0].clone(),
                    new[0].clone(),
                )
            } else {
                let join = |vs: &[AttributeValue]| {
                    AttributeValue::Text(
                        vs.iter().map(AttributeValue::render).collect::<Vec<_>>().join(","),
                    )
                };
                (None, join(&old), join(&new))
            };
            for (pos, &i) in key_idx.iter().enumerate() {
                corrupted[target].values[i] = new[pos].clone();
            }
            log.entries.push(InjectionEntry {
                vector_index: target_index,
                attribute,
                error_type: ErrorType::Uniqueness,
                original,
                injected,
            });
        } else {
            // the key overwrite is the mechanism; the entries record the
            // scope attributes that now conflict between the pair
            for &s in &scope_idx {
                if corrupted[target].values[s] != corrupted[donor].values[s] {
                    log.entries.push(InjectionEntry {
                        vector_index: target_index,
                        attribute: Some(schema.attr_name(s).to_string()),
                        error_type: ErrorType::Contradiction,
                        original: corrupted[target].values[s].clone(),
                        injected: corrupted[donor].values[s].clone(),
                    });
                }
            }
            for &i in &key_idx {
                corrupted[target].values[i] = corrupted[donor].values[i].clone();
            }
        }
    }
    Ok(())
}

/// Insert full copies of sampled vectors at uniformly random positions,
/// then reindex; arrival times of copies snap to their left neighbor so the
/// stream stays ordered.
fn inject_duplicates(
    dataset: Vec<DataVector>,
    spec: &InjectionSpec,
    rng: &mut ChaCha8Rng,
    log: &mut InjectionLog,
) -> Result<Vec<DataVector>> {
    let count = spec.rate.count_for(dataset.len())?;
    if count > dataset.len() {
        return Err(Error::Injection(format!(
            "{count} duplicates requested from {} vectors",
            dataset.len()
        )));
    }
    // tag rows so that the copies can be located after reindexing
    let mut rows: Vec<(bool, DataVector)> = dataset.into_iter().map(|v| (false, v)).collect();
    let originals = rand::seq::index::sample(rng, rows.len(), count);
    let mut copies: Vec<DataVector> = originals
        .iter()
        .map(|i| rows[i].1.clone())
        .collect();
    copies.shuffle(rng);
    for copy in copies {
        let at = rng.gen_range(0..=rows.len());
        rows.insert(at, (true, copy));
    }
    let mut result = Vec::with_capacity(rows.len());
    let mut last_arrival: Option<Instant> = None;
    for (index, (is_copy, mut vector)) in rows.into_iter().enumerate() {
        vector.sequence_index = index as u64 + 1;
        if let Some(last) = last_arrival {
            if vector.arrival < last {
                vector.arrival = last;
            }
        }
        last_arrival = Some(vector.arrival);
        if is_copy {
            log.entries.push(InjectionEntry {
                vector_index: vector.sequence_index,
                attribute: None,
                error_type: ErrorType::Duplicate,
                original: AttributeValue::Null,
                injected: AttributeValue::Text("inserted copy".into()),
            });
        }
        result.push(vector);
    }
    Ok(result)
}

/// Run the detection-only form of the given pipeline over a dataset; an empty
/// result certifies it as ground truth.
pub fn verify_ground_truth(
    dataset: &[DataVector],
    config: &PipelineConfig,
) -> Result<Vec<Finding>> {
    let log = pipeline::run_stream(config.detection_only(), dataset.iter().cloned())?;
    Ok(log.findings().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SchemaAttribute;
    use crate::pipeline::ModuleConfig;

    fn schema() -> Schema {
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("id", AttributeKind::Integer).unique_key(),
            SchemaAttribute::new("x", AttributeKind::Float)
                .not_null()
                .with_interval(IntervalConstraint::inclusive(0.0, 100.0)),
        ]);
        schema.contradiction_scope = ["x".to_string()].into_iter().collect();
        schema
    }

    fn dataset(n: usize) -> Vec<DataVector> {
        (0..n)
            .map(|i| {
                DataVector::new(
                    i as u64 + 1,
                    Instant::from_millis(i as i64 * 1000),
                    vec![
                        AttributeValue::Integer(i as i64),
                        AttributeValue::Float(20.0 + (i % 50) as f64),
                    ],
                )
            })
            .collect()
    }

    #[test]
    fn zero_rate_is_a_no_op() {
        let schema = schema();
        let truth = dataset(100);
        let spec = InjectionSpec::new(ErrorType::Missing, InjectRate::Fraction(0.0), 1)
            .on_attributes(["x"]);
        let (corrupted, log) = inject(&truth, &schema, &spec).unwrap();
        assert_eq!(corrupted, truth);
        assert!(log.entries.is_empty());
    }

    #[test]
    fn injection_is_reproducible_and_sound() {
        let schema = schema();
        let truth = dataset(200);
        let spec = InjectionSpec::new(ErrorType::Interval, InjectRate::Fraction(0.1), 7)
            .on_attributes(["x"]);
        let (a, log_a) = inject(&truth, &schema, &spec).unwrap();
        let (b, log_b) = inject(&truth, &schema, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(log_a, log_b);
        assert_eq!(log_a.total(), 20);

        // every logged cell differs from ground truth, everything else matches
        for entry in &log_a.entries {
            let row = (entry.vector_index - 1) as usize;
            let col = schema.attr_index(entry.attribute.as_deref().unwrap()).unwrap();
            assert_eq!(a[row].values[col], entry.injected);
            assert_eq!(truth[row].values[col], entry.original);
            assert_ne!(a[row].values[col], truth[row].values[col]);
        }
        let mut reverted = a.clone();
        for entry in &log_a.entries {
            let row = (entry.vector_index - 1) as usize;
            let col = schema.attr_index(entry.attribute.as_deref().unwrap()).unwrap();
            reverted[row].values[col] = entry.original.clone();
        }
        assert_eq!(reverted, truth);
    }

    #[test]
    fn interval_injection_lands_outside_the_interval() {
        let schema = schema();
        let truth = dataset(100);
        let spec = InjectionSpec::new(ErrorType::Interval, InjectRate::Count(25), 3)
            .on_attributes(["x"]);
        let (_, log) = inject(&truth, &schema, &spec).unwrap();
        let interval = schema.attributes[1].interval.as_ref().unwrap();
        for entry in &log.entries {
            assert!(!interval.contains(&entry.injected));
        }
    }

    #[test]
    fn infeasible_rate_is_a_spec_fault() {
        let schema = schema();
        let truth = dataset(10);
        let spec = InjectionSpec::new(ErrorType::Duplicate, InjectRate::Count(11), 1);
        assert!(matches!(
            inject(&truth, &schema, &spec),
            Err(Error::Injection(_))
        ));
    }

    #[test]
    fn collision_side_is_an_even_coin_over_many_seeds() {
        let schema = schema();
        let truth = dataset(400);
        let mut before = 0u64;
        let mut total = 0u64;
        for seed in 0..60 {
            let spec = InjectionSpec::new(ErrorType::Uniqueness, InjectRate::Count(40), seed);
            let (corrupted, log) = inject(&truth, &schema, &spec).unwrap();
            for entry in &log.entries {
                // find the donor: the other vector now carrying the same key
                let target_row = (entry.vector_index - 1) as usize;
                let key = corrupted[target_row].values[0].clone();
                let donor_row = corrupted
                    .iter()
                    .position(|v| v.values[0] == key && v.sequence_index != entry.vector_index)
                    .unwrap();
                if target_row < donor_row {
                    before += 1;
                }
                total += 1;
            }
        }
        let fraction = before as f64 / total as f64;
        assert!(
            (0.46..=0.54).contains(&fraction),
            "collision-before-donor fraction {fraction}"
        );
    }

    #[test]
    fn duplicates_grow_the_stream_and_stay_ordered() {
        let schema = schema();
        let truth = dataset(50);
        let spec = InjectionSpec::new(ErrorType::Duplicate, InjectRate::Count(10), 5);
        let (corrupted, log) = inject(&truth, &schema, &spec).unwrap();
        assert_eq!(corrupted.len(), 60);
        assert_eq!(log.total(), 10);
        for pair in corrupted.windows(2) {
            assert!(pair[0].arrival <= pair[1].arrival);
            assert_eq!(pair[0].sequence_index + 1, pair[1].sequence_index);
        }
    }

    #[test]
    fn ground_truth_verification_finds_planted_defects() {
        let schema = schema();
        let truth = dataset(50);
        let config = PipelineConfig::new(schema.clone()).with_modules(vec![
            ModuleConfig::Uniqueness { repair: None },
            ModuleConfig::Interval { repair: None },
            ModuleConfig::Missing { repair: None, per_attribute: Default::default() },
            ModuleConfig::Duplicate { repair: None },
            ModuleConfig::Contradiction { repair: None },
        ]);
        assert!(verify_ground_truth(&truth, &config).unwrap().is_empty());

        let mut defective = truth.clone();
        defective[20].values[1] = AttributeValue::Null;
        let findings = verify_ground_truth(&defective, &config).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].error_type, ErrorType::Missing);
    }

    #[test]
    fn detection_covers_injected_positions_for_cell_types() {
        let schema = schema();
        let truth = dataset(200);
        let spec = InjectionSpec::new(ErrorType::Missing, InjectRate::Fraction(0.05), 11)
            .on_attributes(["x"]);
        let (corrupted, log) = inject(&truth, &schema, &spec).unwrap();
        let config = PipelineConfig::new(schema).with_modules(vec![ModuleConfig::Missing {
            repair: None,
            per_attribute: Default::default(),
        }]);
        let findings = verify_ground_truth(&corrupted, &config).unwrap();
        let found: std::collections::BTreeSet<u64> =
            findings.iter().map(|f| f.vector_index).collect();
        for entry in &log.entries {
            assert!(found.contains(&entry.vector_index));
        }
    }
}
