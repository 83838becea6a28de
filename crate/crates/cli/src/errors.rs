//! CLI error envelope: every failure carries a stable machine-readable
//! code alongside a human-readable message, and nothing ever prints a
//! stack trace. Codes are `area/kind` strings; nested sources resolve to
//! the innermost specific code.

use orbex_core::descriptor::DescriptorError;
use orbex_core::exclusion::ExclusionError;
use orbex_core::groups::GroupError;
use orbex_core::linalg::LinalgError;
use orbex_core::oracle::OracleError;
use orbex_core::pbr::PbrError;
use orbex_core::zero_error::ZeroErrorError;
use std::path::PathBuf;
use thiserror::Error;

use crate::report::Json;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadFile { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    WriteFile { path: PathBuf, source: std::io::Error },
    #[error("scenario does not match the schema: {detail}")]
    Schema { detail: String },
    #[error("unsupported scenario version {got}; this build reads version 1")]
    Version { got: u32 },
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Exclusion(#[from] ExclusionError),
    #[error(transparent)]
    ZeroError(#[from] ZeroErrorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Pbr(#[from] PbrError),
}

impl CliError {
    /// Stable machine-readable code, one per distinct failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::ReadFile { .. } => "cli/io-read",
            CliError::WriteFile { .. } => "cli/io-write",
            CliError::Schema { .. } => "cli/schema",
            CliError::Version { .. } => "cli/version",
            CliError::Descriptor(e) => descriptor_code(e),
            CliError::Exclusion(e) => exclusion_code(e),
            CliError::ZeroError(e) => zero_error_code(e),
            CliError::Oracle(e) => oracle_code(e),
            CliError::Pbr(e) => pbr_code(e),
        }
    }

    /// The error document printed to stdout on failure.
    pub fn to_json(&self) -> Json {
        Json::Obj(vec![(
            "error",
            Json::Obj(vec![
                ("code", Json::str(self.code())),
                ("message", Json::str(self.to_string())),
            ]),
        )])
    }
}

fn descriptor_code(e: &DescriptorError) -> &'static str {
    match e {
        DescriptorError::GroupRequired => "descriptor/group-required",
        DescriptorError::GroupForbidden => "descriptor/group-forbidden",
        DescriptorError::Group(inner) => group_code(inner),
        DescriptorError::Exclusion(inner) => exclusion_code(inner),
    }
}

fn group_code(e: &GroupError) -> &'static str {
    match e {
        GroupError::InvalidOrder => "groups/invalid-order",
        GroupError::MalformedTable => "groups/malformed-table",
        GroupError::NotLatinSquare { .. } => "groups/not-latin-square",
        GroupError::BadIdentity => "groups/bad-identity",
        GroupError::NoInverse { .. } => "groups/no-inverse",
        GroupError::NotAssociative { .. } => "groups/not-associative",
        GroupError::DimensionTooLarge { .. } => "groups/dimension-too-large",
        GroupError::WrongMatrixCount { .. } => "groups/wrong-matrix-count",
        GroupError::NotUnitary { .. } => "groups/not-unitary",
        GroupError::NotHomomorphism { .. } => "groups/not-homomorphism",
    }
}

fn linalg_code(e: &LinalgError) -> &'static str {
    match e {
        LinalgError::NotHermitian { .. } => "linalg/not-hermitian",
        LinalgError::NotConverged { .. } => "linalg/not-converged",
        LinalgError::DimensionMismatch { .. } => "linalg/dimension-mismatch",
        LinalgError::NotSquare { .. } => "linalg/not-square",
    }
}

fn exclusion_code(e: &ExclusionError) -> &'static str {
    match e {
        ExclusionError::EmptySpectrum => "exclusion/empty-spectrum",
        ExclusionError::SpectrumNotNormalized { .. } => "exclusion/spectrum-not-normalized",
        ExclusionError::DuplicateLabel { .. } => "exclusion/duplicate-label",
        ExclusionError::MultiplicityMismatch { .. } => "exclusion/multiplicity-mismatch",
        ExclusionError::UnsupportedMultiplicity { .. } => "exclusion/unsupported-multiplicity",
        ExclusionError::SpectrumBlockMismatch { .. } => "exclusion/spectrum-block-mismatch",
        ExclusionError::SeedNotNormalized { .. } => "exclusion/seed-not-normalized",
        ExclusionError::PolygonInfeasible { .. } => "exclusion/polygon-infeasible",
        ExclusionError::ShiftNotOrthogonal { .. } => "exclusion/shift-not-orthogonal",
        ExclusionError::UnknownShiftBlock { .. } => "exclusion/unknown-shift-block",
        ExclusionError::ShiftNeedsBlockDim { .. } => "exclusion/shift-needs-block-dim",
        ExclusionError::NotAbelian => "exclusion/not-abelian",
        ExclusionError::GapNotPositive { .. } => "exclusion/gap-not-positive",
        ExclusionError::LabelMismatch { .. } => "exclusion/label-mismatch",
        ExclusionError::CompletenessDefect { .. } => "exclusion/completeness-defect",
        ExclusionError::Linalg(inner) => linalg_code(inner),
    }
}

fn zero_error_code(e: &ZeroErrorError) -> &'static str {
    match e {
        ZeroErrorError::DiagonalNotExcluded { .. } => "zero-error/diagonal-not-excluded",
        ZeroErrorError::ExplicitOnly => "zero-error/explicit-only",
        ZeroErrorError::SizeMismatch { .. } => "zero-error/size-mismatch",
        ZeroErrorError::GroupTooSmall { .. } => "zero-error/group-too-small",
        ZeroErrorError::BoundViolation { .. } => "zero-error/bound-violation",
        ZeroErrorError::PackingNumerics { .. } => "zero-error/packing-numerics",
        ZeroErrorError::Exclusion(inner) => exclusion_code(inner),
    }
}

fn oracle_code(e: &OracleError) -> &'static str {
    match e {
        OracleError::NotDensity { .. } => "oracle/not-density",
        OracleError::MixedDimensions { .. } => "oracle/mixed-dimensions",
        OracleError::TooLarge { .. } => "oracle/too-large",
        OracleError::Exclusion(inner) => exclusion_code(inner),
        OracleError::Linalg(inner) => linalg_code(inner),
    }
}

fn pbr_code(e: &PbrError) -> &'static str {
    match e {
        PbrError::DomainError { .. } => "pbr/angle-domain",
        PbrError::TooManyQubits { .. } => "pbr/copy-range",
        PbrError::Exclusion(inner) => exclusion_code(inner),
    }
}
