//! Run orchestration and table rendering.
//!
//! A run loads a level file, builds one growth series per cell (sector, or the merged
//! sector set), estimates the four specifications on each, and renders one table
//! block per cell. Alongside the rendered text it produces a machine-readable results
//! file holding every rendered number at full precision.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::{
    cross_section, growth_rates_with, load_panel, pool, GrowthMode, GrowthObservation, GrowthSeries, LoadedPanel,
    Merge, PanelObservation, Schema, SeriesMode,
};
use crate::error::{Error, Result};
use crate::regress::{mark_significance, FitResult};
use crate::verdoorn::{
    economies_of_scale, run_cell_with, CellLabel, DwMode, IdentityReport, ReferenceNote, SampleId, ScaleVerdict,
    SpecEstimate, Specification, VerdoornReport, IDENTITY_TOLERANCE, REFERENCE_ELASTICITY, REFERENCE_RANGE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Aligned,
    Delimited,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" | "aligned-text" => Ok(OutputFormat::Aligned),
            "delimited" => Ok(OutputFormat::Delimited),
            "markdown" => Ok(OutputFormat::Markdown),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Scale applied to intercepts at render time. Slopes are elasticities and never scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderScale {
    #[default]
    Fraction,
    Percent,
}

impl RenderScale {
    fn factor(self) -> f64 {
        match self {
            RenderScale::Fraction => 1.0,
            RenderScale::Percent => 100.0,
        }
    }
}

impl fmt::Display for RenderScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderScale::Fraction => "fraction",
            RenderScale::Percent => "percent",
        })
    }
}

impl FromStr for RenderScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fraction" => Ok(RenderScale::Fraction),
            "percent" => Ok(RenderScale::Percent),
            other => Err(Error::Config(format!("unknown render scale '{other}'"))),
        }
    }
}

impl FromStr for GrowthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(GrowthMode::Log),
            "percent" => Ok(GrowthMode::Percent),
            other => Err(Error::Config(format!("unknown growth mode '{other}'"))),
        }
    }
}

impl FromStr for DwMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stacked" => Ok(DwMode::Stacked),
            "within-region" => Ok(DwMode::WithinRegion),
            other => Err(Error::Config(format!("unknown DW mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunConfig {
    pub input: PathBuf,
    pub schema: Schema,
    pub mode: SeriesMode,
    /// Empty keeps every sector.
    pub sectors: BTreeSet<String>,
    pub merge: Merge,
    pub growth: GrowthMode,
    pub format: OutputFormat,
    pub scale: RenderScale,
    pub dw: DwMode,
    /// Estimate on the valid rows even when some rows were rejected.
    pub skip_invalid: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rendered: String,
    pub results: String,
    pub reports: Vec<VerdoornReport>,
}

pub fn load_input(config: &RunConfig) -> Result<LoadedPanel> {
    let file = File::open(&config.input).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", config.input.display()),
        ))
    })?;
    load_panel(BufReader::new(file), &config.schema)
}

/// Load, validate and estimate every requested cell.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let loaded = load_input(config)?;
    if !loaded.rejections.is_empty() && !config.skip_invalid {
        let listed: Vec<String> = loaded
            .rejections
            .iter()
            .take(5)
            .map(|r| format!("line {}: {}", r.line, r.reason))
            .collect();
        let more = loaded.rejections.len().saturating_sub(listed.len());
        let tail = if more > 0 {
            format!(" (+{more} more)")
        } else {
            String::new()
        };
        return Err(Error::Validation(format!(
            "{} rejected row(s): {}{tail}",
            loaded.rejections.len(),
            listed.join("; ")
        )));
    }
    run_on_panel(&loaded.observations, config)
}

/// Estimation and rendering on an already loaded panel.
pub fn run_on_panel(panel: &[PanelObservation], config: &RunConfig) -> Result<RunOutput> {
    let series = build_series(panel, config)?;
    let reports = series
        .par_iter()
        .map(|s| {
            let report = run_cell_with(s, config.dw).map_err(|e| Error::Cell {
                cell: format!("{}|{}|{}", s.label, s.period(), s.mode),
                source: Box::new(e),
            })?;
            let tolerance = IDENTITY_TOLERANCE * data_scale(s).max(1.0);
            if !report.identities.holds(tolerance) {
                return Err(Error::Invariant(format!(
                    "cell {}: identity gap {:e} exceeds {:e}",
                    report.cell,
                    report.identities.max_abs_gap(),
                    tolerance
                )));
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RunOutput {
        rendered: render_tables(&reports, config.format, config.scale),
        results: write_results_string(&reports)?,
        reports,
    })
}

fn data_scale(series: &GrowthSeries) -> f64 {
    series
        .observations
        .iter()
        .flat_map(|o| [o.q.abs(), o.e.abs(), o.p.abs()])
        .fold(0.0, f64::max)
}

/// One series per cell: one per sector, or a single merged series.
pub fn build_series(panel: &[PanelObservation], config: &RunConfig) -> Result<Vec<GrowthSeries>> {
    let growth = growth_rates_with(panel, config.growth)?;
    let filtered: Vec<GrowthObservation> = growth
        .into_iter()
        .filter(|o| config.sectors.is_empty() || config.sectors.contains(&o.sector))
        .collect();
    if filtered.is_empty() {
        return Err(Error::EmptyResult(format!(
            "sector filter {{{}}} matched nothing",
            config.sectors.iter().cloned().collect::<Vec<_>>().join(", ")
        )));
    }

    let groups: Vec<Vec<GrowthObservation>> = match config.merge {
        Merge::Merged => vec![filtered],
        Merge::PerSector => {
            let mut by_sector: BTreeMap<String, Vec<GrowthObservation>> = BTreeMap::new();
            for o in filtered {
                by_sector.entry(o.sector.clone()).or_default().push(o);
            }
            by_sector.into_values().collect()
        }
    };

    groups
        .iter()
        .map(|g| match config.mode {
            SeriesMode::Pooled => pool(g, &BTreeSet::new(), config.merge),
            SeriesMode::CrossSection => cross_section(g),
        })
        .collect()
}

const SPEC_COLUMN: &str = "Specification";
const HEADERS: [&str; 6] = ["Constant", "Coefficient", "DW", "R²", "G.L.", "E.E. (1/(1-b))"];
const NOTE: &str =
    "Note: * significant at 5%; ** significant at 10%; G.L. = degrees of freedom; E.E. = economies of scale, 1/(1-b).";

fn coefficient_cell(value: f64, t: f64, p: f64) -> String {
    format!("{value:.3}{} ({t:.3})", mark_significance(p).stars())
}

/// The seven display cells of each specification row.
fn table_rows(report: &VerdoornReport, scale: RenderScale) -> Vec<[String; 7]> {
    report
        .estimates
        .iter()
        .map(|est| {
            let fit = &est.fit;
            let ee = match est.spec {
                Specification::Verdoorn => report.verdoorn_scale().render(),
                _ => String::new(),
            };
            [
                format!("{} {}", est.spec.name(), est.spec.equation()),
                coefficient_cell(fit.intercept * scale.factor(), fit.t_intercept, fit.p_intercept),
                coefficient_cell(fit.slope, fit.t_slope, fit.p_slope),
                format!("{:.3}", fit.durbin_watson),
                format!("{:.3}", fit.r_squared),
                fit.df.to_string(),
                ee,
            ]
        })
        .collect()
}

fn caption(report: &VerdoornReport, scale: RenderScale) -> String {
    format!(
        "{}, {}, {} estimation (constants as {scale})",
        report.cell.sector, report.cell.period, report.cell.mode
    )
}

fn reference_line(report: &VerdoornReport) -> String {
    let note = &report.reference;
    let range = if note.within_historical_range {
        "inside"
    } else {
        "outside"
    };
    format!(
        "Reference elasticity {REFERENCE_ELASTICITY:.2}: b - {REFERENCE_ELASTICITY:.2} = {:+.3} ({range} {:.2}-{:.2}); max identity gap {:.1e}",
        note.deviation,
        REFERENCE_RANGE.0,
        REFERENCE_RANGE.1,
        report.identities.max_abs_gap()
    )
}

/// Render one cell as a table block.
pub fn render_table(report: &VerdoornReport, format: OutputFormat, scale: RenderScale) -> String {
    match format {
        OutputFormat::Aligned => render_aligned(report, scale),
        OutputFormat::Markdown => render_markdown(report, scale),
        OutputFormat::Delimited => {
            let mut out = delimited_header();
            out.push_str(&delimited_rows(report, scale));
            out
        }
    }
}

/// Render several cells; delimited output carries a single header row.
pub fn render_tables(reports: &[VerdoornReport], format: OutputFormat, scale: RenderScale) -> String {
    match format {
        OutputFormat::Delimited => {
            let mut out = delimited_header();
            for r in reports {
                out.push_str(&delimited_rows(r, scale));
            }
            out
        }
        _ => reports
            .iter()
            .map(|r| render_table(r, format, scale))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn render_aligned(report: &VerdoornReport, scale: RenderScale) -> String {
    let rows = table_rows(report, scale);
    let mut header: [String; 7] = Default::default();
    header[0] = String::new();
    for (slot, h) in header.iter_mut().skip(1).zip(HEADERS) {
        *slot = h.to_string();
    }

    let mut widths = [0usize; 7];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |row: &[String; 7]| {
        let mut s = String::new();
        for (i, (cell, w)) in row.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
        }
        s.trim_end().to_string()
    };

    let mut out = String::new();
    out.push_str(&caption(report, scale));
    out.push('\n');
    out.push_str(&line(&header));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out.push_str(NOTE);
    out.push('\n');
    out.push_str(&reference_line(report));
    out.push('\n');
    out
}

fn render_markdown(report: &VerdoornReport, scale: RenderScale) -> String {
    let mut out = format!("**{}**\n\n", caption(report, scale));
    out.push_str(&format!("| {SPEC_COLUMN} | {} |\n", HEADERS.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(HEADERS.len() + 1)));
    for row in table_rows(report, scale) {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out.push('\n');
    out.push_str(NOTE);
    out.push_str("\n\n");
    out.push_str(&reference_line(report));
    out.push('\n');
    out
}

fn delimited_header() -> String {
    "cell,scale,specification,constant,coefficient,dw,r2,df,ee\n".to_string()
}

fn delimited_rows(report: &VerdoornReport, scale: RenderScale) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let cell = report.cell.to_string();
    let scale_name = scale.to_string();
    for row in table_rows(report, scale) {
        let mut record = vec![cell.as_str(), scale_name.as_str()];
        record.extend(row.iter().map(String::as_str));
        w.write_record(&record).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
}

pub const RESULT_HEADER: [&str; 22] = [
    "cell",
    "spec",
    "intercept",
    "slope",
    "se_i",
    "se_s",
    "t_i",
    "t_s",
    "p_i",
    "p_s",
    "r2",
    "dw",
    "df",
    "n",
    "ee_value",
    "ee_label",
    "gap_intercept_negation",
    "gap_slope_complement",
    "gap_rowthorn_intercept",
    "gap_rowthorn_slope",
    "gap_dw_verdoorn_kaldor",
    "gap_dw_rowthorn",
];

const IDENTITY_ROW: &str = "identities";

/// Full-precision results: one row per (cell, specification) and one identity row per cell.
pub fn write_results<W: Write>(reports: &[VerdoornReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for report in reports {
        let cell = report.cell.to_string();
        for est in &report.estimates {
            let f = &est.fit;
            let (ee_value, ee_label) = match est.scale {
                Some(v) => (v.value.to_string(), v.label.as_str().to_string()),
                None => (String::new(), String::new()),
            };
            let mut record = vec![
                cell.clone(),
                est.spec.name().to_string(),
                f.intercept.to_string(),
                f.slope.to_string(),
                f.se_intercept.to_string(),
                f.se_slope.to_string(),
                f.t_intercept.to_string(),
                f.t_slope.to_string(),
                f.p_intercept.to_string(),
                f.p_slope.to_string(),
                f.r_squared.to_string(),
                f.durbin_watson.to_string(),
                f.df.to_string(),
                f.n.to_string(),
                ee_value,
                ee_label,
            ];
            record.extend(std::iter::repeat_n(String::new(), 6));
            w.write_record(&record)?;
        }
        let mut record = vec![cell.clone(), IDENTITY_ROW.to_string()];
        record.extend(std::iter::repeat_n(String::new(), 14));
        record.extend(report.identities.gaps().iter().map(|(_, g)| g.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_string(reports: &[VerdoornReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_results(reports, &mut buf)?;
    Ok(String::from_utf8(buf).expect("results are utf-8"))
}

/// Rebuild reports from a results file. Residuals are not stored, so the fits come
/// back with empty residual vectors; every rendered quantity is restored exactly.
pub fn read_results<R: Read>(source: R) -> Result<Vec<VerdoornReport>> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(RESULT_HEADER) {
        return Err(Error::parse(1, "unexpected results header"));
    }

    let mut cells: Vec<(CellLabel, Vec<SpecEstimate>, Option<IdentityReport>)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let real = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| Error::parse(line, format!("{}: not a number '{}'", RESULT_HEADER[i], &record[i])))
        };
        let count = |i: usize| -> Result<usize> {
            record[i]
                .parse()
                .map_err(|_| Error::parse(line, format!("{}: not an integer '{}'", RESULT_HEADER[i], &record[i])))
        };
        let cell: CellLabel = record[0]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        if cells.last().is_none_or(|(c, _, _)| *c != cell) {
            cells.push((cell, Vec::new(), None));
        }
        let entry = cells.last_mut().expect("just pushed");

        if &record[1] == IDENTITY_ROW {
            entry.2 = Some(IdentityReport {
                intercept_negation_gap: real(16)?,
                slope_complement_gap: real(17)?,
                rowthorn_intercept_gap: real(18)?,
                rowthorn_slope_gap: real(19)?,
                dw_verdoorn_kaldor_gap: real(20)?,
                dw_rowthorn_gap: real(21)?,
            });
            continue;
        }

        let spec: Specification = record[1]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        let scale = if record[15].is_empty() {
            None
        } else {
            Some(ScaleVerdict {
                value: real(14)?,
                label: record[15]
                    .parse()
                    .map_err(|e: Error| Error::parse(line, e.to_string()))?,
            })
        };
        entry.1.push(SpecEstimate {
            spec,
            fit: FitResult {
                intercept: real(2)?,
                slope: real(3)?,
                se_intercept: real(4)?,
                se_slope: real(5)?,
                t_intercept: real(6)?,
                t_slope: real(7)?,
                p_intercept: real(8)?,
                p_slope: real(9)?,
                r_squared: real(10)?,
                durbin_watson: real(11)?,
                df: count(12)?,
                n: count(13)?,
                residuals: Vec::new(),
                degenerate: false,
            },
            scale,
            sample: SampleId(0),
        });
    }

    cells
        .into_iter()
        .map(|(cell, mut ests, identities)| {
            let identities =
                identities.ok_or_else(|| Error::Validation(format!("cell {cell}: missing identity row")))?;
            ests.sort_by_key(|e| e.spec);
            let estimates: [SpecEstimate; 4] = ests
                .try_into()
                .map_err(|_| Error::Validation(format!("cell {cell}: expected four specifications")))?;
            if estimates.iter().map(|e| e.spec).ne(Specification::ALL) {
                return Err(Error::Validation(format!("cell {cell}: duplicate specification")));
            }
            let b = estimates[0].fit.slope;
            let mut estimates = estimates;
            if estimates[0].scale.is_none() {
                estimates[0].scale = Some(economies_of_scale(b));
            }
            Ok(VerdoornReport {
                cell,
                estimates,
                identities,
                reference: ReferenceNote::for_slope(b),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SeriesMode;

    #[allow(clippy::too_many_arguments)]
    fn fit(
        intercept: f64,
        t_i: f64,
        p_i: f64,
        slope: f64,
        t_s: f64,
        p_s: f64,
        dw: f64,
        r2: f64,
        df: usize,
    ) -> FitResult {
        FitResult {
            intercept,
            slope,
            se_intercept: (intercept / t_i).abs(),
            se_slope: (slope / t_s).abs(),
            t_intercept: t_i,
            t_slope: t_s,
            p_intercept: p_i,
            p_slope: p_s,
            r_squared: r2,
            durbin_watson: dw,
            df,
            n: df + 2,
            residuals: Vec::new(),
            degenerate: false,
        }
    }

    /// A reference block at three-decimal rounding, with p-values consistent with its stars.
    fn agriculture() -> VerdoornReport {
        let est = |spec, fit: FitResult| SpecEstimate {
            spec,
            scale: (spec == Specification::Verdoorn).then(|| economies_of_scale(fit.slope)),
            fit,
            sample: SampleId(0),
        };
        let estimates = [
            est(
                Specification::Verdoorn,
                fit(0.042, 5.925, 1e-6, 0.878, 12.527, 4.6e-15, 1.696, 0.805, 38),
            ),
            est(
                Specification::Kaldor,
                fit(-0.042, -5.925, 1e-6, 0.123, 1.750, 0.0882, 1.696, 0.075, 38),
            ),
            est(
                Specification::Rowthorn1,
                fit(-0.010, -0.616, 0.54, -0.621, -1.904, 0.0645, 1.568, 0.087, 38),
            ),
            est(
                Specification::Rowthorn2,
                fit(-0.010, -0.616, 0.54, 0.379, 1.160, 0.2533, 1.568, 0.034, 38),
            ),
        ];
        VerdoornReport {
            cell: CellLabel {
                sector: "agriculture".into(),
                period: "1986-1994".into(),
                mode: SeriesMode::Pooled,
            },
            identities: check_gaps(&estimates),
            reference: ReferenceNote::for_slope(0.878),
            estimates,
        }
    }

    fn check_gaps(e: &[SpecEstimate; 4]) -> IdentityReport {
        crate::verdoorn::check_identities(e).unwrap()
    }

    #[test]
    fn printed_cells_reproduce() {
        let rows = table_rows(&agriculture(), RenderScale::Fraction);
        assert_eq!(rows[0][2], "0.878* (12.527)");
        assert_eq!(rows[0][1], "0.042* (5.925)");
        assert_eq!(rows[1][2], "0.123** (1.750)");
        assert_eq!(rows[2][2], "-0.621** (-1.904)");
        assert_eq!(rows[3][2], "0.379 (1.160)");
        assert_eq!(rows[0][6], "8.197");
        assert!(rows[1..].iter().all(|r| r[6].is_empty()));
        assert_eq!(rows[0][5], "38");
    }

    #[test]
    fn percent_scale_only_touches_constants() {
        let rows = table_rows(&agriculture(), RenderScale::Percent);
        assert_eq!(rows[0][1], "4.200* (5.925)");
        assert_eq!(rows[0][2], "0.878* (12.527)");
        let text = render_table(&agriculture(), OutputFormat::Aligned, RenderScale::Percent);
        assert!(text.lines().next().unwrap().contains("constants as percent"));
    }

    #[test]
    fn unacceptable_scale_renders_dashes() {
        let mut r = agriculture();
        r.estimates[0].fit.slope = -0.126;
        r.estimates[0].scale = Some(economies_of_scale(-0.126));
        assert_eq!(table_rows(&r, RenderScale::Fraction)[0][6], "---");
    }

    #[test]
    fn aligned_layout() {
        let text = render_table(&agriculture(), OutputFormat::Aligned, RenderScale::Fraction);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[1].contains("Constant") && lines[1].contains("E.E. (1/(1-b))"));
        assert!(lines[2].starts_with("Verdoorn p = a + bq"));
        assert!(lines[5].starts_with("Rowthorn2 q = λ2 + ε2e"));
        // columns line up (by char, not byte)
        let col = |l: &str, needle: &str| {
            l.chars()
                .collect::<String>()
                .find(needle)
                .map(|b| l[..b].chars().count())
        };
        assert_eq!(col(lines[1], "Coefficient"), col(lines[2], "0.878*"));
        assert!(lines.iter().all(|l| !l.ends_with(' ')));
    }

    #[test]
    fn delimited_has_one_header_and_no_padding() {
        let reports = vec![agriculture(), agriculture()];
        let text = render_tables(&reports, OutputFormat::Delimited, RenderScale::Fraction);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 8);
        assert_eq!(lines.iter().filter(|l| l.starts_with("cell,")).count(), 1);
        assert_eq!(lines[1], "agriculture|1986-1994|pooled,fraction,Verdoorn p = a + bq,0.042* (5.925),0.878* (12.527),1.696,0.805,38,8.197");
        assert!(!text.contains("  "));
    }

    #[test]
    fn markdown_table() {
        let text = render_table(&agriculture(), OutputFormat::Markdown, RenderScale::Fraction);
        assert!(text.contains("| Specification | Constant | Coefficient | DW | R² | G.L. | E.E. (1/(1-b)) |"));
        assert!(text.contains("| Kaldor e = c + dq | -0.042* (-5.925) | 0.123** (1.750) | 1.696 | 0.075 | 38 |  |"));
    }

    #[test]
    fn results_round_trip_rerenders_identically() {
        let reports = vec![agriculture()];
        let text = write_results_string(&reports).unwrap();
        let back = read_results(text.as_bytes()).unwrap();
        for format in [OutputFormat::Aligned, OutputFormat::Delimited, OutputFormat::Markdown] {
            for scale in [RenderScale::Fraction, RenderScale::Percent] {
                assert_eq!(
                    render_tables(&back, format, scale),
                    render_tables(&reports, format, scale)
                );
            }
        }
        assert_eq!(back[0].identities, reports[0].identities);
    }

    #[test]
    fn results_reject_bad_header() {
        assert!(matches!(
            read_results("a,b\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
