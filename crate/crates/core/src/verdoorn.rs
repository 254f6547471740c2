//! The four growth-law specifications, returns-to-scale classification and the
//! cross-equation identity checks implied by p = q − e.
//!
//! | spec      | response | regressor | coefficients |
//! |-----------|----------|-----------|--------------|
//! | Verdoorn  | p        | q         | a, b         |
//! | Kaldor    | e        | q         | c, d         |
//! | Rowthorn1 | p        | e         | λ1, ε1       |
//! | Rowthorn2 | q        | e         | λ2, ε2       |
//!
//! Under the identity, c = −a, d = 1 − b, λ1 = λ2 and ε2 = 1 + ε1, and each pair of
//! fits sharing a regressor has residuals of opposite sign (or equal), hence equal DW.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::dataset::{GrowthSeries, SeriesMode, Variable};
use crate::error::{Error, Result};
use crate::regress::{ols_fit_with, DwPairs, FitResult};

/// Historical average of the productivity-output elasticity.
pub const REFERENCE_ELASTICITY: f64 = 0.45;
/// Historical range around [`REFERENCE_ELASTICITY`].
pub const REFERENCE_RANGE: (f64, f64) = (0.41, 0.57);
/// |b| at or below this counts as constant returns.
pub const CONSTANT_RETURNS_TOLERANCE: f64 = 1e-12;
/// Largest admissible identity gap on fraction-scale growth data.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Specification {
    Verdoorn,
    Kaldor,
    Rowthorn1,
    Rowthorn2,
}

impl Specification {
    pub const ALL: [Specification; 4] = [
        Specification::Verdoorn,
        Specification::Kaldor,
        Specification::Rowthorn1,
        Specification::Rowthorn2,
    ];

    pub fn response(self) -> Variable {
        match self {
            Specification::Verdoorn | Specification::Rowthorn1 => Variable::P,
            Specification::Kaldor => Variable::E,
            Specification::Rowthorn2 => Variable::Q,
        }
    }

    pub fn regressor(self) -> Variable {
        match self {
            Specification::Verdoorn | Specification::Kaldor => Variable::Q,
            Specification::Rowthorn1 | Specification::Rowthorn2 => Variable::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Specification::Verdoorn => "Verdoorn",
            Specification::Kaldor => "Kaldor",
            Specification::Rowthorn1 => "Rowthorn1",
            Specification::Rowthorn2 => "Rowthorn2",
        }
    }

    pub fn equation(self) -> &'static str {
        match self {
            Specification::Verdoorn => "p = a + bq",
            Specification::Kaldor => "e = c + dq",
            Specification::Rowthorn1 => "p = λ1 + ε1e",
            Specification::Rowthorn2 => "q = λ2 + ε2e",
        }
    }
}

impl fmt::Display for Specification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Specification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Specification::ALL
            .into_iter()
            .find(|spec| spec.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown specification '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleLabel {
    Increasing,
    Constant,
    /// Never produced by [`economies_of_scale`]; b < 0 is labelled unacceptable.
    Decreasing,
    Unbounded,
    Unacceptable,
}

impl ScaleLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleLabel::Increasing => "increasing",
            ScaleLabel::Constant => "constant",
            ScaleLabel::Decreasing => "decreasing",
            ScaleLabel::Unbounded => "unbounded",
            ScaleLabel::Unacceptable => "unacceptable",
        }
    }
}

impl FromStr for ScaleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ScaleLabel::Increasing,
            ScaleLabel::Constant,
            ScaleLabel::Decreasing,
            ScaleLabel::Unbounded,
            ScaleLabel::Unacceptable,
        ]
        .into_iter()
        .find(|l| l.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown scale label '{s}'")))
    }
}

/// Returns-to-scale index 1/(1 − b) with its classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleVerdict {
    /// 1/(1 − b) for b < 1, +∞ otherwise.
    pub value: f64,
    pub label: ScaleLabel,
}

impl ScaleVerdict {
    /// Table cell: the index at three decimals, `∞` when unbounded, `---` when b < 0.
    pub fn render(&self) -> String {
        match self.label {
            ScaleLabel::Unbounded => "∞".to_string(),
            ScaleLabel::Unacceptable => "---".to_string(),
            _ => format!("{:.3}", self.value),
        }
    }
}

pub fn economies_of_scale(b: f64) -> ScaleVerdict {
    if b >= 1.0 {
        return ScaleVerdict {
            value: f64::INFINITY,
            label: ScaleLabel::Unbounded,
        };
    }
    let value = 1.0 / (1.0 - b);
    let label = if b.abs() <= CONSTANT_RETURNS_TOLERANCE {
        ScaleLabel::Constant
    } else if b < 0.0 {
        ScaleLabel::Unacceptable
    } else {
        ScaleLabel::Increasing
    };
    let value = if label == ScaleLabel::Constant { 1.0 } else { value };
    ScaleVerdict { value, label }
}

/// Identifies the exact observation set a fit was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleId(pub u64);

impl SampleId {
    pub fn of(series: &GrowthSeries) -> Self {
        let mut h = DefaultHasher::new();
        series.mode.hash(&mut h);
        for o in &series.observations {
            o.region.hash(&mut h);
            o.sector.hash(&mut h);
            o.year_to.hash(&mut h);
            o.q.to_bits().hash(&mut h);
            o.e.to_bits().hash(&mut h);
            o.p.to_bits().hash(&mut h);
        }
        SampleId(h.finish())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecEstimate {
    pub spec: Specification,
    pub fit: FitResult,
    /// Only set for [`Specification::Verdoorn`].
    pub scale: Option<ScaleVerdict>,
    pub sample: SampleId,
}

/// Residual pairs used for the Durbin-Watson statistic on a stacked series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DwMode {
    #[default]
    Stacked,
    /// Drop pairs that straddle a region (unit) boundary.
    WithinRegion,
}

pub fn estimate(series: &GrowthSeries, spec: Specification) -> Result<SpecEstimate> {
    estimate_with(series, spec, DwMode::Stacked)
}

pub fn estimate_with(series: &GrowthSeries, spec: Specification, dw: DwMode) -> Result<SpecEstimate> {
    let x = series.column(spec.regressor());
    let y = series.column(spec.response());
    let starts;
    let pairs = match dw {
        DwMode::Stacked => DwPairs::Stacked,
        DwMode::WithinRegion => {
            starts = series.region_starts();
            DwPairs::WithinGroups(&starts)
        }
    };
    let fit = ols_fit_with(&x, &y, pairs).map_err(|source| Error::Estimation { spec, source })?;
    let scale = (spec == Specification::Verdoorn).then(|| economies_of_scale(fit.slope));
    Ok(SpecEstimate {
        spec,
        fit,
        scale,
        sample: SampleId::of(series),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// a + c
    pub intercept_negation_gap: f64,
    /// b + d − 1
    pub slope_complement_gap: f64,
    /// λ1 − λ2
    pub rowthorn_intercept_gap: f64,
    /// ε2 − ε1 − 1
    pub rowthorn_slope_gap: f64,
    /// DW(Verdoorn) − DW(Kaldor)
    pub dw_verdoorn_kaldor_gap: f64,
    /// DW(Rowthorn1) − DW(Rowthorn2)
    pub dw_rowthorn_gap: f64,
}

impl IdentityReport {
    pub fn gaps(&self) -> [(&'static str, f64); 6] {
        [
            ("intercept_negation", self.intercept_negation_gap),
            ("slope_complement", self.slope_complement_gap),
            ("rowthorn_intercept", self.rowthorn_intercept_gap),
            ("rowthorn_slope", self.rowthorn_slope_gap),
            ("dw_verdoorn_kaldor", self.dw_verdoorn_kaldor_gap),
            ("dw_rowthorn", self.dw_rowthorn_gap),
        ]
    }

    pub fn max_abs_gap(&self) -> f64 {
        self.gaps().iter().fold(0.0, |m, (_, g)| m.max(g.abs()))
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.gaps().iter().all(|(_, g)| g.abs() <= tolerance)
    }
}

/// Compare the four fits of one cell. Each specification must appear exactly once
/// and all fits must come from the same sample.
pub fn check_identities(estimates: &[SpecEstimate]) -> Result<IdentityReport> {
    let find = |spec: Specification| -> Result<&SpecEstimate> {
        let mut hits = estimates.iter().filter(|e| e.spec == spec);
        match (hits.next(), hits.next()) {
            (Some(e), None) => Ok(e),
            (None, _) => Err(Error::InvalidComparison(format!("missing {spec} estimate"))),
            (Some(_), Some(_)) => Err(Error::InvalidComparison(format!("duplicate {spec} estimate"))),
        }
    };
    let v = find(Specification::Verdoorn)?;
    let k = find(Specification::Kaldor)?;
    let r1 = find(Specification::Rowthorn1)?;
    let r2 = find(Specification::Rowthorn2)?;

    if let Some(odd) = [k, r1, r2].iter().find(|e| e.sample != v.sample || e.fit.n != v.fit.n) {
        return Err(Error::InvalidComparison(format!(
            "{} was estimated on a different observation set than Verdoorn",
            odd.spec
        )));
    }

    Ok(IdentityReport {
        intercept_negation_gap: v.fit.intercept + k.fit.intercept,
        slope_complement_gap: v.fit.slope + k.fit.slope - 1.0,
        rowthorn_intercept_gap: r1.fit.intercept - r2.fit.intercept,
        rowthorn_slope_gap: r2.fit.slope - r1.fit.slope - 1.0,
        dw_verdoorn_kaldor_gap: v.fit.durbin_watson - k.fit.durbin_watson,
        dw_rowthorn_gap: r1.fit.durbin_watson - r2.fit.durbin_watson,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellLabel {
    pub sector: String,
    pub period: String,
    pub mode: SeriesMode,
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.sector, self.period, self.mode)
    }
}

impl FromStr for CellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // sector may itself contain '|', so split from the right
        let mut parts = s.rsplitn(3, '|');
        let (mode, period, sector) = match (parts.next(), parts.next(), parts.next()) {
            (Some(m), Some(p), Some(sec)) => (m, p, sec),
            _ => return Err(Error::Config(format!("malformed cell label '{s}'"))),
        };
        Ok(CellLabel {
            sector: sector.to_string(),
            period: period.to_string(),
            mode: mode.parse()?,
        })
    }
}

/// Distance of the estimated Verdoorn slope from the historical reference. Informational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceNote {
    pub b: f64,
    pub deviation: f64,
    pub within_historical_range: bool,
}

impl ReferenceNote {
    pub fn for_slope(b: f64) -> Self {
        ReferenceNote {
            b,
            deviation: b - REFERENCE_ELASTICITY,
            within_historical_range: (REFERENCE_RANGE.0..=REFERENCE_RANGE.1).contains(&b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdoornReport {
    pub cell: CellLabel,
    /// In [`Specification::ALL`] order.
    pub estimates: [SpecEstimate; 4],
    pub identities: IdentityReport,
    pub reference: ReferenceNote,
}

impl VerdoornReport {
    pub fn get(&self, spec: Specification) -> &SpecEstimate {
        &self.estimates[spec as usize]
    }

    pub fn verdoorn_scale(&self) -> ScaleVerdict {
        self.get(Specification::Verdoorn)
            .scale
            .unwrap_or_else(|| economies_of_scale(self.get(Specification::Verdoorn).fit.slope))
    }
}

pub fn run_cell(series: &GrowthSeries) -> Result<VerdoornReport> {
    run_cell_with(series, DwMode::Stacked)
}

/// Estimate all four specifications on one series and check the identities.
pub fn run_cell_with(series: &GrowthSeries, dw: DwMode) -> Result<VerdoornReport> {
    let estimates = [
        estimate_with(series, Specification::Verdoorn, dw)?,
        estimate_with(series, Specification::Kaldor, dw)?,
        estimate_with(series, Specification::Rowthorn1, dw)?,
        estimate_with(series, Specification::Rowthorn2, dw)?,
    ];
    let identities = check_identities(&estimates)?;
    let reference = ReferenceNote::for_slope(estimates[0].fit.slope);
    Ok(VerdoornReport {
        cell: CellLabel {
            sector: series.label.clone(),
            period: series.period(),
            mode: series.mode,
        },
        estimates,
        identities,
        reference,
    })
}
