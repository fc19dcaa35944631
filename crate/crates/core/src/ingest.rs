//! Dataset file formats and parcel-record assembly.
//!
//! Everything on disk is CSV with a leading `#cropcast-csv v1 <kind>` comment
//! line guarding schema drift. A cropping season runs Oct 1 to Sep 30
//! ("season n" = October of year n to October of year n+1) and day-of-season
//! 0 is always Oct 1; in-memory series concatenate seasons on a global day
//! axis (season index * 365 + day).
//!
//! Formats:
//! - crops:         `foi_id,season,crop_code,x_km,y_km,area_ha`
//! - observations:  `foi_id,season,variable,day,value,valid`
//! - regular:       `foi_id,season,variable,start_day,step_days,v0..vK`
//! - features:      `foi_id,season,f0..fN`
//! - distributions: `foi_id,crop_code,share`
//! - taxonomy:      `code,name,permanent_flag`
//! - aggregation:   `leaf_code,group_code,group_name`
//! - history:       `epoch,split,metric,value`

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::features::{CropVocab, SeasonFeatures};
use crate::signal::{ObservationSeries, RegularSeries, VariableId};
use crate::taxonomy::{AggregationMap, CropCode, TaxonomyTree};
use crate::SEASON_DAYS;

pub const CSV_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed csv at {path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("duplicate crop row for foi {foi} season {season}")]
    DuplicateCrop { foi: String, season: u32 },
    #[error("out of range value at {path}:{line}: {reason}")]
    OutOfRange { path: PathBuf, line: usize, reason: String },
    #[error("dataset has no records")]
    Empty,
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.to_path_buf(), source }
    }
}

/// One field of interest: stable geometry plus per-season crops and the
/// concatenated observation series.
#[derive(Debug, Clone)]
pub struct ParcelRecord {
    pub foi_id: String,
    pub x_km: f64,
    pub y_km: f64,
    pub area_ha: f64,
    pub crops: BTreeMap<u32, CropCode>,
    /// Series on the global day axis spanning all seasons.
    pub series: BTreeMap<VariableId, ObservationSeries>,
    /// Seasons with a crop but no observations; zero-padded downstream.
    pub missing_rs_seasons: BTreeSet<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub country: String,
    pub seasons: Vec<u32>,
    /// Fixed convention: day 0 of season n is Oct 1 of year n.
    pub season_convention: String,
    pub files: Vec<FileDigest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_file(path: &Path) -> Result<String, IngestError> {
    let bytes = std::fs::read(path).map_err(|e| IngestError::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn open_reader(path: &Path, kind: &str) -> Result<(BufReader<std::fs::File>, usize), IngestError> {
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| IngestError::io(path, e))?;
    let expect = format!("#cropcast-csv {CSV_VERSION} {kind}");
    if first.trim() != expect {
        return Err(IngestError::Malformed {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header {expect:?}, found {:?}", first.trim()),
        });
    }
    Ok((reader, 1))
}

fn writer(path: &Path, kind: &str, columns: &str) -> Result<BufWriter<std::fs::File>, IngestError> {
    let file = std::fs::File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "#cropcast-csv {CSV_VERSION} {kind}").map_err(|e| IngestError::io(path, e))?;
    writeln!(w, "{columns}").map_err(|e| IngestError::io(path, e))?;
    Ok(w)
}

struct RowReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<std::fs::File>>,
    line_no: usize,
}

impl RowReader {
    fn new(path: &Path, kind: &str, columns: &str) -> Result<Self, IngestError> {
        let (reader, consumed) = open_reader(path, kind)?;
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| IngestError::io(path, e))?
            .unwrap_or_default();
        if header.trim() != columns {
            return Err(IngestError::Malformed {
                path: path.to_path_buf(),
                line: consumed + 1,
                reason: format!("expected columns {columns:?}, found {:?}", header.trim()),
            });
        }
        Ok(RowReader { path: path.to_path_buf(), lines, line_no: consumed + 1 })
    }

    fn next_row(&mut self) -> Result<Option<(usize, Vec<String>)>, IngestError> {
        loop {
            match self.lines.next() {
                None => return Ok(None),
                Some(Err(e)) => return Err(IngestError::io(&self.path, e)),
                Some(Ok(line)) => {
                    self.line_no += 1;
                    let trimmed = line.trim();
                    if trimmed.is_empty() || trimmed.starts_with('#') {
                        continue;
                    }
                    let fields = trimmed.split(',').map(|s| s.trim().to_string()).collect();
                    return Ok(Some((self.line_no, fields)));
                }
            }
        }
    }

    fn malformed(&self, line: usize, reason: impl Into<String>) -> IngestError {
        IngestError::Malformed { path: self.path.clone(), line, reason: reason.into() }
    }
}

fn parse<T: std::str::FromStr>(
    r: &RowReader,
    line: usize,
    field: &str,
    name: &str,
) -> Result<T, IngestError> {
    field
        .parse::<T>()
        .map_err(|_| r.malformed(line, format!("cannot parse {name} from {field:?}")))
}

// --- crops ---

const CROPS_COLUMNS: &str = "foi_id,season,crop_code,x_km,y_km,area_ha";

pub fn write_crops(path: &Path, records: &[ParcelRecord]) -> Result<(), IngestError> {
    let mut w = writer(path, "crops", CROPS_COLUMNS)?;
    for rec in records {
        for (season, code) in &rec.crops {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                rec.foi_id, season, code, rec.x_km, rec.y_km, rec.area_ha
            )
            .map_err(|e| IngestError::io(path, e))?;
        }
    }
    Ok(())
}

// --- observations ---

const OBS_COLUMNS: &str = "foi_id,season,variable,day,value,valid";

pub fn write_observations(
    path: &Path,
    records: &[ParcelRecord],
    seasons: &[u32],
) -> Result<(), IngestError> {
    let first = *seasons.first().unwrap_or(&0);
    let mut w = writer(path, "observations", OBS_COLUMNS)?;
    for rec in records {
        for (var, series) in &rec.series {
            for ((day, value), valid) in
                series.days.iter().zip(&series.values).zip(&series.valid)
            {
                let season = first + (day / SEASON_DAYS) as u32;
                let local = day % SEASON_DAYS;
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    rec.foi_id,
                    season,
                    var,
                    local,
                    value,
                    u8::from(*valid)
                )
                .map_err(|e| IngestError::io(path, e))?;
            }
        }
    }
    Ok(())
}

/// Loads the crops table only; records come back with empty series. The
/// feature stages that no longer need raw observations use this.
pub fn load_crops(path: &Path) -> Result<(Vec<ParcelRecord>, Vec<u32>), IngestError> {
    let mut records: BTreeMap<String, ParcelRecord> = BTreeMap::new();
    let mut seasons: BTreeSet<u32> = BTreeSet::new();
    let mut r = RowReader::new(path, "crops", CROPS_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 6 {
            return Err(r.malformed(line, format!("expected 6 fields, found {}", f.len())));
        }
        let foi = f[0].clone();
        let season: u32 = parse(&r, line, &f[1], "season")?;
        let code = CropCode::parse(&f[2]).map_err(|e| r.malformed(line, e.to_string()))?;
        let x: f64 = parse(&r, line, &f[3], "x_km")?;
        let y: f64 = parse(&r, line, &f[4], "y_km")?;
        let area: f64 = parse(&r, line, &f[5], "area_ha")?;
        if !(area > 0.0) {
            return Err(IngestError::OutOfRange {
                path: path.to_path_buf(),
                line,
                reason: format!("area_ha {area} must be positive"),
            });
        }
        seasons.insert(season);
        let rec = records.entry(foi.clone()).or_insert_with(|| ParcelRecord {
            foi_id: foi.clone(),
            x_km: x,
            y_km: y,
            area_ha: area,
            crops: BTreeMap::new(),
            series: BTreeMap::new(),
            missing_rs_seasons: BTreeSet::new(),
        });
        if rec.crops.insert(season, code).is_some() {
            return Err(IngestError::DuplicateCrop { foi, season });
        }
    }
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok((records.into_values().collect(), seasons.into_iter().collect()))
}

/// Loads crops + observations into parcel records. Validation: versioned
/// headers, parseable fields, one crop per (foi, season), positive areas,
/// day-of-season in [0, 365).
pub fn load_dataset(
    crops_path: &Path,
    obs_path: &Path,
    country: &str,
) -> Result<(Vec<ParcelRecord>, DatasetManifest), IngestError> {
    let mut records: BTreeMap<String, ParcelRecord> = BTreeMap::new();
    let mut seasons_seen: BTreeSet<u32> = BTreeSet::new();

    let mut r = RowReader::new(crops_path, "crops", CROPS_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 6 {
            return Err(r.malformed(line, format!("expected 6 fields, found {}", f.len())));
        }
        let foi = f[0].clone();
        let season: u32 = parse(&r, line, &f[1], "season")?;
        let code = CropCode::parse(&f[2]).map_err(|e| r.malformed(line, e.to_string()))?;
        let x: f64 = parse(&r, line, &f[3], "x_km")?;
        let y: f64 = parse(&r, line, &f[4], "y_km")?;
        let area: f64 = parse(&r, line, &f[5], "area_ha")?;
        if !(area > 0.0) {
            return Err(IngestError::OutOfRange {
                path: crops_path.to_path_buf(),
                line,
                reason: format!("area_ha {area} must be positive"),
            });
        }
        seasons_seen.insert(season);
        let rec = records.entry(foi.clone()).or_insert_with(|| ParcelRecord {
            foi_id: foi.clone(),
            x_km: x,
            y_km: y,
            area_ha: area,
            crops: BTreeMap::new(),
            series: BTreeMap::new(),
            missing_rs_seasons: BTreeSet::new(),
        });
        if rec.crops.insert(season, code).is_some() {
            return Err(IngestError::DuplicateCrop { foi, season });
        }
    }
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    let seasons: Vec<u32> = seasons_seen.iter().copied().collect();
    let first_season = seasons[0];

    // Observations arrive in any order; collect then sort by day.
    let mut obs: BTreeMap<(String, VariableId), Vec<(i64, f64, bool)>> = BTreeMap::new();
    let mut r = RowReader::new(obs_path, "observations", OBS_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 6 {
            return Err(r.malformed(line, format!("expected 6 fields, found {}", f.len())));
        }
        let foi = f[0].clone();
        let season: u32 = parse(&r, line, &f[1], "season")?;
        let var = VariableId(f[2].clone());
        let day: i64 = parse(&r, line, &f[3], "day")?;
        let value: f64 = parse(&r, line, &f[4], "value")?;
        let valid_raw: u8 = parse(&r, line, &f[5], "valid")?;
        if !(0..SEASON_DAYS).contains(&day) {
            return Err(IngestError::OutOfRange {
                path: obs_path.to_path_buf(),
                line,
                reason: format!("day {day} outside [0, {SEASON_DAYS})"),
            });
        }
        if valid_raw > 1 {
            return Err(IngestError::OutOfRange {
                path: obs_path.to_path_buf(),
                line,
                reason: format!("valid flag {valid_raw} not in {{0,1}}"),
            });
        }
        let global = (season.saturating_sub(first_season)) as i64 * SEASON_DAYS + day;
        obs.entry((foi, var)).or_default().push((global, value, valid_raw == 1));
    }

    for ((foi, var), mut samples) in obs {
        if let Some(rec) = records.get_mut(&foi) {
            samples.sort_by_key(|(d, _, _)| *d);
            samples.dedup_by_key(|(d, _, _)| *d);
            let days: Vec<i64> = samples.iter().map(|(d, _, _)| *d).collect();
            let values: Vec<f64> = samples.iter().map(|(_, v, _)| *v).collect();
            let valid: Vec<bool> = samples.iter().map(|(_, _, k)| *k).collect();
            let series = ObservationSeries::new(var.clone(), days, values, valid)
                .expect("sorted deduplicated days are strictly increasing");
            rec.series.insert(var, series);
        }
    }

    // Flag crop seasons with no observations at all.
    for rec in records.values_mut() {
        for &season in rec.crops.keys() {
            let lo = (season - first_season) as i64 * SEASON_DAYS;
            let hi = lo + SEASON_DAYS;
            let any = rec
                .series
                .values()
                .any(|s| s.days.iter().any(|d| (lo..hi).contains(d)));
            if !any {
                rec.missing_rs_seasons.insert(season);
            }
        }
    }

    let manifest = DatasetManifest {
        country: country.to_string(),
        seasons,
        season_convention: "season n spans Oct 1 of year n to Sep 30 of year n+1; day 0 = Oct 1"
            .to_string(),
        files: vec![
            FileDigest {
                path: crops_path.display().to_string(),
                sha256: sha256_file(crops_path)?,
            },
            FileDigest { path: obs_path.display().to_string(), sha256: sha256_file(obs_path)? },
        ],
    };
    Ok((records.into_values().collect(), manifest))
}

// --- smoothed (regular) series ---

const REGULAR_COLUMNS: &str = "foi_id,season,variable,start_day,step_days,values";

pub fn write_regular(
    path: &Path,
    rows: &[(String, u32, RegularSeries)],
) -> Result<(), IngestError> {
    let mut w = writer(path, "regular", REGULAR_COLUMNS)?;
    for (foi, season, series) in rows {
        let values: Vec<String> = series.values.iter().map(|v| v.to_string()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            foi,
            season,
            series.variable,
            series.start_day,
            series.step_days,
            values.join(";")
        )
        .map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

pub fn read_regular(path: &Path) -> Result<Vec<(String, u32, RegularSeries)>, IngestError> {
    let mut out = Vec::new();
    let mut r = RowReader::new(path, "regular", REGULAR_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 6 {
            return Err(r.malformed(line, format!("expected 6 fields, found {}", f.len())));
        }
        let values: Result<Vec<f64>, _> = f[5].split(';').map(|v| v.parse::<f64>()).collect();
        let values = values.map_err(|_| r.malformed(line, "cannot parse values"))?;
        out.push((
            f[0].clone(),
            parse(&r, line, &f[1], "season")?,
            RegularSeries {
                variable: VariableId(f[2].clone()),
                start_day: parse(&r, line, &f[3], "start_day")?,
                step_days: parse(&r, line, &f[4], "step_days")?,
                values,
            },
        ));
    }
    Ok(out)
}

// --- features ---

pub fn write_features(path: &Path, rows: &[SeasonFeatures]) -> Result<(), IngestError> {
    let dim = rows.first().map(|r| r.values.len()).unwrap_or(0);
    let cols: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
    let mut w = writer(path, "features", &format!("foi_id,season,{}", cols.join(",")))?;
    for row in rows {
        let values: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{},{}", row.foi_id, row.season, values.join(","))
            .map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<SeasonFeatures>, IngestError> {
    let (reader, _) = open_reader(path, "features")?;
    let mut lines = reader.lines();
    let _header = lines.next();
    let mut out = Vec::new();
    let mut line_no = 2usize;
    for line in lines {
        line_no += 1;
        let line = line.map_err(|e| IngestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() < 3 {
            return Err(IngestError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                reason: "expected foi_id,season,features...".into(),
            });
        }
        let values: Result<Vec<f64>, _> = fields[2..].iter().map(|v| v.parse::<f64>()).collect();
        out.push(SeasonFeatures {
            foi_id: fields[0].to_string(),
            season: fields[1].parse().map_err(|_| IngestError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                reason: "cannot parse season".into(),
            })?,
            values: values.map_err(|_| IngestError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                reason: "cannot parse feature value".into(),
            })?,
            missing: Vec::new(),
        });
    }
    Ok(out)
}

// --- distributions ---

const DIST_COLUMNS: &str = "foi_id,crop_code,share";

pub fn write_distributions(
    path: &Path,
    rows: &[(String, CropCode, f64)],
) -> Result<(), IngestError> {
    let mut w = writer(path, "distributions", DIST_COLUMNS)?;
    for (foi, code, share) in rows {
        writeln!(w, "{foi},{code},{share}").map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

pub fn read_distributions(path: &Path) -> Result<Vec<(String, CropCode, f64)>, IngestError> {
    let mut out = Vec::new();
    let mut r = RowReader::new(path, "distributions", DIST_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 3 {
            return Err(r.malformed(line, format!("expected 3 fields, found {}", f.len())));
        }
        out.push((
            f[0].clone(),
            CropCode::parse(&f[1]).map_err(|e| r.malformed(line, e.to_string()))?,
            parse(&r, line, &f[2], "share")?,
        ));
    }
    Ok(out)
}

// --- taxonomy ---

const TAXONOMY_COLUMNS: &str = "code,name,permanent_flag";

pub fn write_taxonomy(path: &Path, tree: &TaxonomyTree) -> Result<(), IngestError> {
    let mut w = writer(path, "taxonomy", TAXONOMY_COLUMNS)?;
    for node in tree.nodes() {
        if node.code.is_root() {
            continue;
        }
        writeln!(w, "{},{},{}", node.code, node.name, u8::from(node.permanent))
            .map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

pub fn read_taxonomy(path: &Path) -> Result<TaxonomyTree, IngestError> {
    let mut tree = TaxonomyTree::new();
    let mut r = RowReader::new(path, "taxonomy", TAXONOMY_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 3 {
            return Err(r.malformed(line, format!("expected 3 fields, found {}", f.len())));
        }
        let code = CropCode::parse(&f[0]).map_err(|e| r.malformed(line, e.to_string()))?;
        let permanent: u8 = parse(&r, line, &f[2], "permanent_flag")?;
        tree.insert(code, &f[1], permanent == 1);
    }
    Ok(tree)
}

// --- aggregation map ---

const AGG_COLUMNS: &str = "leaf_code,group_code,group_name";

pub fn write_aggregation(path: &Path, map: &AggregationMap) -> Result<(), IngestError> {
    let mut w = writer(path, "aggregation", AGG_COLUMNS)?;
    for (leaf, group) in map.entries() {
        writeln!(w, "{leaf},{group},{}", map.group_name(group))
            .map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

pub fn read_aggregation(path: &Path) -> Result<AggregationMap, IngestError> {
    let mut pairs = Vec::new();
    let mut r = RowReader::new(path, "aggregation", AGG_COLUMNS)?;
    while let Some((line, f)) = r.next_row()? {
        if f.len() != 3 {
            return Err(r.malformed(line, format!("expected 3 fields, found {}", f.len())));
        }
        let leaf = CropCode::parse(&f[0]).map_err(|e| r.malformed(line, e.to_string()))?;
        let group = CropCode::parse(&f[1]).map_err(|e| r.malformed(line, e.to_string()))?;
        pairs.push((leaf, group, f[2].clone()));
    }
    Ok(AggregationMap::from_pairs(pairs))
}

// --- training history ---

const HISTORY_COLUMNS: &str = "epoch,split,metric,value";

pub fn write_history(
    path: &Path,
    rows: &[(usize, String, String, f64)],
) -> Result<(), IngestError> {
    let mut w = writer(path, "history", HISTORY_COLUMNS)?;
    for (epoch, split, metric, value) in rows {
        writeln!(w, "{epoch},{split},{metric},{value}").map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

/// Lexicographically ordered union of the crop codes used across datasets.
pub fn build_vocab<'a>(
    datasets: impl IntoIterator<Item = &'a [ParcelRecord]>,
    unknown_enabled: bool,
) -> CropVocab {
    let mut codes = BTreeSet::new();
    for records in datasets {
        for rec in records {
            codes.extend(rec.crops.values().copied());
        }
    }
    CropVocab::new(codes, unknown_enabled)
}
