//! Level data ingestion and the transformation to growth-rate series.
//!
//! Levels arrive as one row per region × sector × year. Growth rates are kept as
//! natural fractions; any ×100 scaling is a rendering concern.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PanelObservation {
    pub region: String,
    pub sector: String,
    pub year: i32,
    pub output: f64,
    pub employment: f64,
}

/// Column mapping for delimited level files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub region: String,
    pub sector: String,
    pub year: String,
    pub output: String,
    pub employment: String,
    pub delimiter: u8,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            region: "region".into(),
            sector: "sector".into(),
            year: "year".into(),
            output: "output".into(),
            employment: "employment".into(),
            delimiter: b',',
        }
    }
}

/// A data row that parsed but failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedPanel {
    pub observations: Vec<PanelObservation>,
    pub rejections: Vec<Rejection>,
}

/// Read level data. Malformed rows abort with a parse error; rows that parse but
/// violate an invariant (non-positive level, duplicate key) go to the rejection list.
pub fn load_panel<R: Read>(source: R, schema: &Schema) -> Result<LoadedPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(1, format!("missing column '{name}'")))
    };
    let idx_region = column(&schema.region)?;
    let idx_sector = column(&schema.sector)?;
    let idx_year = column(&schema.year)?;
    let idx_output = column(&schema.output)?;
    let idx_employment = column(&schema.employment)?;

    let mut loaded = LoadedPanel::default();
    let mut seen: HashMap<(String, String, i32), u64> = HashMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let field = |i: usize| &record[i];
        let number = |i: usize, name: &str| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("non-numeric {name} '{}'", field(i))))
        };

        let year: i32 = field(idx_year)
            .parse()
            .map_err(|_| Error::parse(line, format!("non-integer year '{}'", field(idx_year))))?;
        let output = number(idx_output, "output")?;
        let employment = number(idx_employment, "employment")?;
        let region = field(idx_region).to_string();
        let sector = field(idx_sector).to_string();

        let mut reject = |reason: String| loaded.rejections.push(Rejection { line, reason });

        if region.is_empty() || sector.is_empty() {
            reject("empty identifier".into());
            continue;
        }
        if !output.is_finite() || !employment.is_finite() {
            reject(format!(
                "non-finite level: output = {output}, employment = {employment}"
            ));
            continue;
        }
        if output <= 0.0 || employment <= 0.0 {
            let cell = if output <= 0.0 {
                format!("output = {output}")
            } else {
                format!("employment = {employment}")
            };
            reject(format!("non-positive level: {cell}"));
            continue;
        }
        let key = (region.clone(), sector.clone(), year);
        if let Some(first) = seen.get(&key) {
            reject(format!(
                "duplicate key ({region}, {sector}, {year}); first seen at line {first}"
            ));
            continue;
        }
        seen.insert(key, line);

        loaded.observations.push(PanelObservation {
            region,
            sector,
            year,
            output,
            employment,
        });
    }
    Ok(loaded)
}

pub fn write_panel<W: Write>(panel: &[PanelObservation], delimiter: u8, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(["region", "sector", "year", "output", "employment"])?;
    for o in panel {
        w.write_record([
            o.region.as_str(),
            o.sector.as_str(),
            &o.year.to_string(),
            &o.output.to_string(),
            &o.employment.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rejections<W: Write>(rejections: &[Rejection], delimiter: u8, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(["line", "reason"])?;
    for r in rejections {
        w.write_record([r.line.to_string().as_str(), r.reason.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// How growth rates are computed from consecutive levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GrowthMode {
    /// ln(x_t / x_{t−1}); makes p = q − e an exact identity.
    #[default]
    Log,
    /// x_t / x_{t−1} − 1, with p defined as q − e.
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    /// output growth
    Q,
    /// employment growth
    E,
    /// labour-productivity growth
    P,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Q => "q",
            Variable::E => "e",
            Variable::P => "p",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthObservation {
    pub region: String,
    pub sector: String,
    pub year_to: i32,
    pub q: f64,
    pub e: f64,
    pub p: f64,
}

impl GrowthObservation {
    pub fn get(&self, var: Variable) -> f64 {
        match var {
            Variable::Q => self.q,
            Variable::E => self.e,
            Variable::P => self.p,
        }
    }
}

pub fn growth_rates(panel: &[PanelObservation]) -> Result<Vec<GrowthObservation>> {
    growth_rates_with(panel, GrowthMode::Log)
}

/// One observation per consecutive year pair within each (region, sector) unit.
/// Gaps in the year sequence are not bridged.
pub fn growth_rates_with(panel: &[PanelObservation], mode: GrowthMode) -> Result<Vec<GrowthObservation>> {
    let mut units: BTreeMap<(&str, &str), Vec<&PanelObservation>> = BTreeMap::new();
    for o in panel {
        units.entry((&o.region, &o.sector)).or_default().push(o);
    }

    let rate = |now: f64, before: f64| match mode {
        GrowthMode::Log => (now / before).ln(),
        GrowthMode::Percent => now / before - 1.0,
    };

    let mut out = Vec::new();
    let mut barren = Vec::new();
    for ((region, sector), mut rows) in units {
        rows.sort_by_key(|o| o.year);
        let before = out.len();
        for pair in rows.windows(2) {
            let (prev, cur) = (pair[0], pair[1]);
            if cur.year != prev.year + 1 {
                continue;
            }
            let q = rate(cur.output, prev.output);
            let e = rate(cur.employment, prev.employment);
            out.push(GrowthObservation {
                region: region.to_string(),
                sector: sector.to_string(),
                year_to: cur.year,
                q,
                e,
                p: q - e,
            });
        }
        if out.len() == before {
            barren.push(format!("{region}/{sector}"));
        }
    }

    if out.is_empty() {
        let named = if barren.is_empty() {
            "empty panel".to_string()
        } else {
            format!("no unit has two consecutive years: {}", barren.join(", "))
        };
        return Err(Error::EmptyResult(named));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SeriesMode {
    #[default]
    Pooled,
    CrossSection,
}

impl SeriesMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesMode::Pooled => "pooled",
            SeriesMode::CrossSection => "cross-section",
        }
    }
}

impl fmt::Display for SeriesMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(SeriesMode::Pooled),
            "cross-section" => Ok(SeriesMode::CrossSection),
            other => Err(Error::Config(format!("unknown series mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Merge {
    #[default]
    PerSector,
    Merged,
}

/// An ordered estimation sample.
///
/// Pooled series are region-major then year-ascending (merged series put the sector
/// outermost). Cross-section series hold one averaged observation per region.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSeries {
    pub label: String,
    pub mode: SeriesMode,
    /// First level year and last level year covered by the transitions.
    pub span: (i32, i32),
    pub observations: Vec<GrowthObservation>,
}

impl GrowthSeries {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn column(&self, var: Variable) -> Vec<f64> {
        self.observations.iter().map(|o| o.get(var)).collect()
    }

    /// Indices where a new region block starts (always includes 0 for non-empty series).
    pub fn region_starts(&self) -> Vec<usize> {
        let mut starts = Vec::new();
        for (i, o) in self.observations.iter().enumerate() {
            let new_block = i == 0 || {
                let prev = &self.observations[i - 1];
                prev.region != o.region || prev.sector != o.sector
            };
            if new_block {
                starts.push(i);
            }
        }
        starts
    }

    /// Distinct regions, sorted.
    pub fn regions(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.observations.iter().map(|o| o.region.as_str()).collect();
        set.into_iter().collect()
    }

    pub fn period(&self) -> String {
        format!("{}-{}", self.span.0, self.span.1)
    }

    /// Copy of the series without the given region's observations.
    pub fn without_region(&self, region: &str) -> GrowthSeries {
        GrowthSeries {
            label: self.label.clone(),
            mode: self.mode,
            span: self.span,
            observations: self
                .observations
                .iter()
                .filter(|o| o.region != region)
                .cloned()
                .collect(),
        }
    }
}

/// Distinct sector ids present in a growth list, sorted.
pub fn sectors(growth: &[GrowthObservation]) -> BTreeSet<String> {
    growth.iter().map(|o| o.sector.clone()).collect()
}

fn sector_label(growth: &[GrowthObservation]) -> String {
    let set: BTreeSet<&str> = growth.iter().map(|o| o.sector.as_str()).collect();
    set.into_iter().collect::<Vec<_>>().join("+")
}

fn span_of(growth: &[GrowthObservation]) -> (i32, i32) {
    let first = growth.iter().map(|o| o.year_to).min().unwrap_or(0);
    let last = growth.iter().map(|o| o.year_to).max().unwrap_or(0);
    (first - 1, last)
}

/// Stack observations for pooled estimation.
///
/// An empty `sector_filter` keeps every sector. `Merge::PerSector` requires the
/// filtered data to contain exactly one sector.
pub fn pool(growth: &[GrowthObservation], sector_filter: &BTreeSet<String>, merge: Merge) -> Result<GrowthSeries> {
    let mut kept: Vec<GrowthObservation> = growth
        .iter()
        .filter(|o| sector_filter.is_empty() || sector_filter.contains(&o.sector))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyResult(format!(
            "sector filter {{{}}} matched nothing",
            sector_filter.iter().cloned().collect::<Vec<_>>().join(", ")
        )));
    }
    let present = sectors(&kept);
    if merge == Merge::PerSector && present.len() > 1 {
        return Err(Error::Validation(format!(
            "per-sector pooling matched {} sectors ({}); use merged mode or filter to one sector",
            present.len(),
            present.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }

    kept.sort_by(|a, b| (&a.sector, &a.region, a.year_to).cmp(&(&b.sector, &b.region, b.year_to)));
    if merge == Merge::PerSector {
        debug_assert!(kept.windows(2).all(|w| w[0].sector == w[1].sector));
    }

    Ok(GrowthSeries {
        label: sector_label(&kept),
        mode: SeriesMode::Pooled,
        span: span_of(&kept),
        observations: kept,
    })
}

/// One observation per region: the mean of q and e over the region's transitions,
/// with p = mean(q) − mean(e).
pub fn cross_section(growth: &[GrowthObservation]) -> Result<GrowthSeries> {
    if growth.is_empty() {
        return Err(Error::EmptyResult("cross-section of an empty growth list".into()));
    }
    let mut by_region: BTreeMap<&str, Vec<&GrowthObservation>> = BTreeMap::new();
    for o in growth {
        by_region.entry(&o.region).or_default().push(o);
    }
    let observations = by_region
        .into_iter()
        .map(|(region, rows)| {
            let n = rows.len() as f64;
            let q = rows.iter().map(|o| o.q).sum::<f64>() / n;
            let e = rows.iter().map(|o| o.e).sum::<f64>() / n;
            let owned: Vec<GrowthObservation> = rows.iter().map(|&o| o.clone()).collect();
            GrowthObservation {
                region: region.to_string(),
                sector: sector_label(&owned),
                year_to: rows.iter().map(|o| o.year_to).max().unwrap_or(0),
                q,
                e,
                p: q - e,
            }
        })
        .collect();
    Ok(GrowthSeries {
        label: sector_label(growth),
        mode: SeriesMode::CrossSection,
        span: span_of(growth),
        observations,
    })
}

const SERIES_META_PREFIX: &str = "# series";

/// Interchange format: a metadata comment line, a header row
/// `region,sector,year_to,q,e,p`, then one row per observation at full precision.
pub fn write_series<W: Write>(series: &GrowthSeries, delimiter: u8, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{SERIES_META_PREFIX} mode={} span={}:{} label={}",
        series.mode, series.span.0, series.span.1, series.label
    )?;
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(["region", "sector", "year_to", "q", "e", "p"])?;
    for o in &series.observations {
        w.write_record([
            o.region.as_str(),
            o.sector.as_str(),
            &o.year_to.to_string(),
            &o.q.to_string(),
            &o.e.to_string(),
            &o.p.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a series written by [`write_series`]. Without the metadata line the series
/// is taken as pooled, labelled by its sectors, with the span inferred from `year_to`.
pub fn read_series<R: Read>(source: R, delimiter: u8) -> Result<GrowthSeries> {
    let mut buffered = BufReader::new(source);
    let mut first = String::new();
    buffered.read_line(&mut first)?;

    let (meta, body): (Option<SeriesMeta>, String) =
        if let Some(rest) = first.trim_end_matches(['\r', '\n']).strip_prefix(SERIES_META_PREFIX) {
            (Some(parse_series_meta(rest.trim())?), String::new())
        } else {
            (None, first)
        };
    let mut remaining = body;
    buffered.read_to_string(&mut remaining)?;
    let line_offset = u64::from(meta.is_some());

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(remaining.as_bytes());
    let mut observations = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0) + line_offset;
        if record.len() != 6 {
            return Err(Error::parse(line, format!("expected 6 fields, found {}", record.len())));
        }
        let real = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| Error::parse(line, format!("non-numeric value '{}'", &record[i])))
        };
        observations.push(GrowthObservation {
            region: record[0].to_string(),
            sector: record[1].to_string(),
            year_to: record[2]
                .parse()
                .map_err(|_| Error::parse(line, format!("non-integer year '{}'", &record[2])))?,
            q: real(3)?,
            e: real(4)?,
            p: real(5)?,
        });
    }

    Ok(match meta {
        Some((mode, span, label)) => GrowthSeries {
            label,
            mode,
            span,
            observations,
        },
        None => GrowthSeries {
            label: sector_label(&observations),
            mode: SeriesMode::Pooled,
            span: span_of(&observations),
            observations,
        },
    })
}

/// Mode, span and label from the metadata line.
type SeriesMeta = (SeriesMode, (i32, i32), String);

fn parse_series_meta(text: &str) -> Result<SeriesMeta> {
    let bad = || Error::parse(1, format!("malformed series metadata '{text}'"));
    let rest = text.strip_prefix("mode=").ok_or_else(bad)?;
    let (mode, rest) = rest.split_once(" span=").ok_or_else(bad)?;
    let (span, label) = rest.split_once(" label=").ok_or_else(bad)?;
    let (start, end) = span.split_once(':').ok_or_else(bad)?;
    let span = (start.parse().map_err(|_| bad())?, end.parse().map_err(|_| bad())?);
    Ok((mode.parse()?, span, label.to_string()))
}
