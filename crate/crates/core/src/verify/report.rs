use std::fmt;

use crate::integrate::VolumeEstimate;

/// Which inequality a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityId {
    /// `P(K) <= P(B)` for Lebesgue measure.
    Santalo,
    /// `μ(K) <= μ(S_u K)`.
    SymmetralBody,
    /// `μ(K°) <= μ((S_u K)°)`.
    SymmetralPolar,
    /// `P_μ(K) <= P_μ(S_u K)`.
    SymmetralProduct,
    /// One step of the unconditionalization pipeline.
    Chain,
    /// `P_μ(K) <= μ(B)²`.
    Main,
    /// `Σ |x_i y_i| <= 1` on boundary pairs of `K` and `K°`.
    PairingBound,
    /// Midpoints of opposite polar slices lie in the symmetral's polar.
    MeyerPajor,
    /// `μ(K) μ(L) <= μ(K^{1/2} L^{1/2})²`.
    GeometricMean,
    /// Midpoint concavity of `t -> log μ(e^t B)`.
    BallLogConcavity,
}

impl InequalityId {
    pub const ALL: [InequalityId; 10] = [
        Self::Santalo,
        Self::SymmetralBody,
        Self::SymmetralPolar,
        Self::SymmetralProduct,
        Self::Chain,
        Self::Main,
        Self::PairingBound,
        Self::MeyerPajor,
        Self::GeometricMean,
        Self::BallLogConcavity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Santalo => "santalo",
            Self::SymmetralBody => "claim1_body",
            Self::SymmetralPolar => "claim1_polar",
            Self::SymmetralProduct => "claim1_product",
            Self::Chain => "chain",
            Self::Main => "main",
            Self::PairingBound => "corollary",
            Self::MeyerPajor => "meyer_pajor",
            Self::GeometricMean => "prop8",
            Self::BallLogConcavity => "ball_logconcavity",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identifiers attached to a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportContext {
    pub n: usize,
    pub body_id: String,
    pub measure_id: String,
    pub seed: Option<u64>,
    /// Free-form remark, e.g. a vacuous pass or the pipeline step.
    pub note: Option<String>,
}

/// Certification of `lhs <= rhs` up to the propagated error.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub id: InequalityId,
    pub lhs: VolumeEstimate,
    pub rhs: VolumeEstimate,
    /// `rhs - lhs`.
    pub margin: f64,
    /// `3 (lhs.err + rhs.err) + 1e-9`.
    pub slack: f64,
    pub passed: bool,
    pub context: ReportContext,
}

pub const CSV_HEADER: &str =
    "inequality_id,n,body_id,measure_id,lhs,lhs_err,rhs,rhs_err,margin,slack,passed,seed";

impl VerificationReport {
    pub fn new(
        id: InequalityId,
        lhs: VolumeEstimate,
        rhs: VolumeEstimate,
        context: ReportContext,
    ) -> Self {
        let margin = rhs.value - lhs.value;
        let slack = 3.0 * (lhs.err + rhs.err) + 1e-9;
        Self {
            id,
            lhs,
            rhs,
            margin,
            slack,
            passed: margin >= -slack,
            context,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.context.note = Some(note.into());
        self
    }

    /// One CSV row matching [`CSV_HEADER`], reals at 17 significant digits.
    pub fn csv_row(&self) -> String {
        let c = &self.context;
        format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.id,
            c.n,
            csv_field(&c.body_id),
            csv_field(&c.measure_id),
            self.lhs.value,
            self.lhs.err,
            self.rhs.value,
            self.rhs.err,
            self.margin,
            self.slack,
            self.passed,
            c.seed.map(|s| s.to_string()).unwrap_or_default()
        )
    }

    /// Sort key used for stable report files.
    pub fn sort_key(&self) -> (&str, &str, InequalityId, Option<&str>) {
        (
            &self.context.body_id,
            &self.context.measure_id,
            self.id,
            self.context.note.as_deref(),
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{} | {}]: lhs {:.10} ± {:.2e}, rhs {:.10} ± {:.2e}, margin {:.3e} (slack {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.context.body_id,
            self.context.measure_id,
            self.lhs.value,
            self.lhs.err,
            self.rhs.value,
            self.rhs.err,
            self.margin,
            self.slack
        )
    }
}
