//! Synthetic evaluation generation, CSV ingestion and export, and
//! representative-subset selection for real rating datasets.
//!
//! File formats (UTF-8, `.` decimal separator, header row required):
//!
//! * evaluations: `alternative_id,user_id,<criterion_1>,...,<criterion_m>`
//! * matrix: `alternative_id,<criterion_1>,...,<criterion_m>`

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::DataError;
use crate::model::{criterion_names, CriterionSpec, Evaluation, EvaluationSet, PerformanceMatrix};

/// One score band, as fractions of the criterion domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

/// Score bands of the high, mid and low tiers and the probability mass
/// concentrated inside a tier's band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierProfile {
    pub bands: [Band; 3],
    pub in_band_mass: f64,
}

impl Default for TierProfile {
    /// 70-85, 50-75 and 30-55 on a 0-100 scale, 70% of mass in band.
    fn default() -> Self {
        TierProfile {
            bands: [
                Band { lo: 0.70, hi: 0.85 },
                Band { lo: 0.50, hi: 0.75 },
                Band { lo: 0.30, hi: 0.55 },
            ],
            in_band_mass: 0.7,
        }
    }
}

/// Tier (0 = high, 1 = mid, 2 = low) of alternative `index` among `n`.
pub fn tier_of(index: usize, n: usize) -> usize {
    let first = n.div_ceil(3);
    let second = (2 * n).div_ceil(3);
    if index < first {
        0
    } else if index < second {
        1
    } else {
        2
    }
}

/// One score: uniform inside the band with probability `in_band_mass`,
/// otherwise uniform over the rest of the domain; snapped to the criterion's step.
pub fn draw_score<R: Rng + ?Sized>(criterion: &CriterionSpec, band: Band, in_band_mass: f64, rng: &mut R) -> f64 {
    let (min, width) = (criterion.domain_min, criterion.width());
    let lo = min + band.lo * width;
    let hi = min + band.hi * width;
    let band_width = hi - lo;
    let x = if rng.gen::<f64>() < in_band_mass {
        lo + rng.gen::<f64>() * band_width
    } else {
        let x = min + rng.gen::<f64>() * (width - band_width);
        if x >= lo {
            x + band_width
        } else {
            x
        }
    };
    snap(criterion, x)
}

fn snap(criterion: &CriterionSpec, x: f64) -> f64 {
    let x = match criterion.step {
        Some(step) if step > 0.0 => criterion.domain_min + ((x - criterion.domain_min) / step).round() * step,
        _ => x,
    };
    criterion.clamp(x)
}

/// Synthetic evaluations for `n_alternatives` with K rows each.
///
/// The first ceil(n/3) alternatives form the high tier, up to ceil(2n/3) the
/// mid tier, and the rest the low tier. User ids are unique across the set.
pub fn gen_synthetic<R: Rng + ?Sized>(
    n_alternatives: usize,
    criteria: &[CriterionSpec],
    k: usize,
    rng: &mut R,
) -> Result<EvaluationSet, DataError> {
    gen_synthetic_with(n_alternatives, criteria, k, &TierProfile::default(), rng)
}

pub fn gen_synthetic_with<R: Rng + ?Sized>(
    n_alternatives: usize,
    criteria: &[CriterionSpec],
    k: usize,
    profile: &TierProfile,
    rng: &mut R,
) -> Result<EvaluationSet, DataError> {
    if n_alternatives < 3 {
        return Err(DataError::BadTierSplit(n_alternatives));
    }
    if k == 0 {
        return Err(DataError::ZeroK);
    }
    let width = n_alternatives.to_string().len().max(2);
    let mut set = EvaluationSet::new(criterion_names(criteria));
    for a in 0..n_alternatives {
        let band = profile.bands[tier_of(a, n_alternatives)];
        let rows = (0..k)
            .map(|u| Evaluation {
                user: format!("u{:0width$}-{u}", a + 1),
                scores: criteria
                    .iter()
                    .map(|c| draw_score(c, band, profile.in_band_mass, rng))
                    .collect(),
            })
            .collect();
        set.push_group(format!("a{:0width$}", a + 1), rows);
    }
    Ok(set)
}

fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_error(line: u64, e: impl std::fmt::Display) -> DataError {
    DataError::ParseError {
        line,
        detail: e.to_string(),
    }
}

/// Column index of every criterion, in criterion order.
fn criterion_columns(headers: &csv::StringRecord, criteria: &[CriterionSpec]) -> Result<Vec<usize>, DataError> {
    criteria
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h.trim() == c.name)
                .ok_or_else(|| DataError::MissingColumn(c.name.clone()))
        })
        .collect()
}

fn parse_score(raw: &str, criterion: &CriterionSpec, line: u64) -> Result<f64, DataError> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|e| parse_error(line, format!("{}: '{raw}': {e}", criterion.name)))?;
    if !v.is_finite() || !criterion.contains(v) {
        return Err(DataError::DomainViolation {
            line,
            detail: format!(
                "{} = {v} outside [{}, {}]",
                criterion.name, criterion.domain_min, criterion.domain_max
            ),
        });
    }
    if !criterion.on_grid(v) {
        return Err(DataError::DomainViolation {
            line,
            detail: format!(
                "{} = {v} is off the {} step grid",
                criterion.name,
                criterion.step.unwrap_or(0.0)
            ),
        });
    }
    Ok(v)
}

/// Reads evaluations; alternatives keep first-appearance order.
///
/// Counts per alternative may differ (full datasets); pipelines that need a
/// single K check it themselves.
pub fn read_evaluations<R: Read>(input: R, criteria: &[CriterionSpec]) -> Result<EvaluationSet, DataError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = reader.headers().map_err(|e| parse_error(1, e))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let alt_col = find("alternative_id")?;
    let user_col = find("user_id")?;
    let cols = criterion_columns(&headers, criteria)?;

    let mut set = EvaluationSet::new(criterion_names(criteria));
    let mut seen: HashMap<String, HashSet<String>> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(e.position().map_or(0, |p| p.line()), e))?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let alt = record[alt_col].trim();
        let user = record[user_col].trim();
        let scores = criteria
            .iter()
            .zip(&cols)
            .map(|(c, &i)| parse_score(&record[i], c, line))
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.entry(alt.to_string()).or_default().insert(user.to_string()) {
            return Err(DataError::DuplicateUserForAlternative {
                line,
                user: user.to_string(),
                alternative: alt.to_string(),
            });
        }
        set.push(alt, user, scores);
    }
    Ok(set)
}

pub fn load_evaluations_csv(path: &Path, criteria: &[CriterionSpec]) -> Result<EvaluationSet, DataError> {
    read_evaluations(open(path)?, criteria)
}

pub fn write_evaluations<W: Write>(evals: &EvaluationSet, out: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| parse_error(0, e);
    let mut header = vec!["alternative_id".to_string(), "user_id".to_string()];
    header.extend(evals.criteria().iter().cloned());
    w.write_record(&header).map_err(io)?;
    for (alt, rows) in evals.groups() {
        for row in rows {
            let mut rec = vec![alt.clone(), row.user.clone()];
            rec.extend(row.scores.iter().map(f64::to_string));
            w.write_record(&rec).map_err(io)?;
        }
    }
    w.flush().map_err(|e| parse_error(0, e))?;
    Ok(())
}

pub fn write_matrix<W: Write>(matrix: &PerformanceMatrix, out: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| parse_error(0, e);
    let mut header = vec!["alternative_id".to_string()];
    header.extend(matrix.criteria().iter().cloned());
    w.write_record(&header).map_err(io)?;
    for (alt, row) in matrix.rows() {
        let mut rec = vec![alt.to_string()];
        // Display for f64 prints the shortest string that round-trips.
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| parse_error(0, e))?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R, criteria: &[CriterionSpec]) -> Result<PerformanceMatrix, DataError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = reader.headers().map_err(|e| parse_error(1, e))?.clone();
    let alt_col = headers
        .iter()
        .position(|h| h.trim() == "alternative_id")
        .ok_or_else(|| DataError::MissingColumn("alternative_id".into()))?;
    let cols = criterion_columns(&headers, criteria)?;
    let mut alternatives = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(e.position().map_or(0, |p| p.line()), e))?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        alternatives.push(record[alt_col].trim().to_string());
        for (c, &i) in criteria.iter().zip(&cols) {
            let raw = record[i].trim();
            let v: f64 = raw
                .parse()
                .map_err(|e| parse_error(line, format!("{}: '{raw}': {e}", c.name)))?;
            if !v.is_finite() || !c.contains(v) {
                return Err(DataError::DomainViolation {
                    line,
                    detail: format!("{} = {v} outside [{}, {}]", c.name, c.domain_min, c.domain_max),
                });
            }
            values.push(v);
        }
    }
    Ok(PerformanceMatrix::new(alternatives, criterion_names(criteria), values))
}

pub fn read_matrix_csv(path: &Path, criteria: &[CriterionSpec]) -> Result<PerformanceMatrix, DataError> {
    read_matrix(open(path)?, criteria)
}

/// Writes through a temporary file in the target directory and renames it
/// into place only when `fill` succeeds.
pub fn write_atomic<E, F>(path: &Path, fill: F) -> Result<(), E>
where
    E: From<DataError>,
    F: FnOnce(&mut BufWriter<&mut File>) -> Result<(), E>,
{
    let io_err = |source: std::io::Error| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_matrix_csv(matrix: &PerformanceMatrix, path: &Path) -> Result<(), DataError> {
    write_atomic(path, |w| write_matrix(matrix, w))
}

pub fn write_evaluations_csv(evals: &EvaluationSet, path: &Path) -> Result<(), DataError> {
    write_atomic(path, |w| write_evaluations(evals, w))
}

fn mean_profile(rows: &[Evaluation], m: usize) -> Vec<f64> {
    let mut p = vec![0.0; m];
    for r in rows {
        for (acc, x) in p.iter_mut().zip(&r.scores) {
            *acc += x;
        }
    }
    p.iter_mut().for_each(|x| *x /= rows.len() as f64);
    p
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Samples `n` alternatives uniformly among those with at least `k`
/// evaluations and keeps, for each, the `k` evaluations closest (Euclidean)
/// to its mean review profile.
///
/// Users already consumed by an earlier alternative are skipped and the next
/// closest rows backfill, so the output has pairwise-disjoint contributors.
pub fn select_alternatives<R: Rng + ?Sized>(
    evals: &EvaluationSet,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<EvaluationSet, DataError> {
    if k == 0 {
        return Err(DataError::ZeroK);
    }
    let qualifying: Vec<usize> = (0..evals.n_alternatives())
        .filter(|&i| evals.rows(i).len() >= k)
        .collect();
    if qualifying.len() < n {
        return Err(DataError::NotEnoughAlternatives {
            needed: n,
            k,
            found: qualifying.len(),
        });
    }
    let picked = rand::seq::index::sample(rng, qualifying.len(), n);

    let m = evals.criteria().len();
    let mut used: HashSet<&str> = HashSet::new();
    let mut out = EvaluationSet::new(evals.criteria().to_vec());
    for pick in picked.iter() {
        let (alt, rows) = &evals.groups()[qualifying[pick]];
        let profile = mean_profile(rows, m);
        let mut order: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (distance(&r.scores, &profile), i))
            .collect();
        // Stable: equal distances keep input order.
        order.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut kept = Vec::with_capacity(k);
        for &(_, i) in &order {
            if kept.len() == k {
                break;
            }
            if !used.contains(rows[i].user.as_str()) {
                kept.push(i);
            }
        }
        if kept.len() < k {
            return Err(DataError::NotEnoughDisjointUsers {
                alternative: alt.clone(),
                needed: k,
                found: kept.len(),
            });
        }
        for &i in &kept {
            used.insert(rows[i].user.as_str());
        }
        out.push_group(alt.clone(), kept.into_iter().map(|i| rows[i].clone()).collect());
    }
    Ok(out)
}
