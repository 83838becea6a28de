//! JSON-facing descriptions of groups and instances.
//!
//! Descriptors are the serialization boundary: strict (unknown fields are
//! rejected), built from plain data (complex numbers as `[re, im]`
//! pairs), and convertible into validated [`ExclusionInstance`] values.
//!
//! Explicit instances name their blocks by the character labels of the
//! group's decomposition (`chi0`, `chi1`, ... in character-table order,
//! with `chi0` the trivial character); cyclic, product, and explicit
//! Cayley-table groups act through their regular representation, while
//! `pauli_z` uses the diagonal sign action on `n` qubits.

use crate::exclusion::{BlockSpectrum, ExclusionError, ExclusionInstance, SpectrumTerm};
use crate::groups::{FiniteGroup, GroupError, UnitaryRep};
use crate::linalg::c;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("explicit instances need a group")]
    GroupRequired,
    #[error("block-level instances carry no group; remove the group field")]
    GroupForbidden,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Exclusion(#[from] ExclusionError),
}

/// A finite group, in one of the supported encodings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDescriptor {
    /// `Z_n`.
    Cyclic { order: usize },
    /// `Z_{n1} x Z_{n2} x ...`.
    Product { factors: Vec<usize> },
    /// `Z_2^n` acting by diagonal sign flips on `n` qubits.
    PauliZ { qubits: usize },
    /// Arbitrary finite group as a Cayley table (identity must be
    /// element 0).
    Explicit { cayley: Vec<Vec<usize>> },
}

impl GroupDescriptor {
    pub fn to_group(&self) -> Result<FiniteGroup, DescriptorError> {
        Ok(match self {
            GroupDescriptor::Cyclic { order } => FiniteGroup::cyclic(*order)?,
            GroupDescriptor::Product { factors } => {
                let mut iter = factors.iter();
                let first = *iter.next().ok_or(GroupError::InvalidOrder)?;
                let mut group = FiniteGroup::cyclic(first)?;
                for &f in iter {
                    group = FiniteGroup::direct_product(&group, &FiniteGroup::cyclic(f)?);
                }
                group
            }
            GroupDescriptor::PauliZ { qubits } => {
                // Validate through the representation cap.
                UnitaryRep::pauli_z_rep(*qubits)?.group().clone()
            }
            GroupDescriptor::Explicit { cayley } => FiniteGroup::from_cayley(cayley.clone())?,
        })
    }

    /// The unitary action the descriptor implies: the regular
    /// representation, except for `pauli_z` which uses the diagonal sign
    /// action.
    pub fn to_rep(&self) -> Result<UnitaryRep, DescriptorError> {
        Ok(match self {
            GroupDescriptor::PauliZ { qubits } => UnitaryRep::pauli_z_rep(*qubits)?,
            other => UnitaryRep::regular_rep(&other.to_group()?),
        })
    }
}

fn default_one() -> usize {
    1
}

/// One spectrum term: `amplitude` is `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermDescriptor {
    pub label: String,
    #[serde(default = "default_one")]
    pub irrep_dim: usize,
    #[serde(default = "default_one")]
    pub multiplicity: usize,
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeDescriptor {
    Explicit,
    BlockLevel,
}

/// A complete instance description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceDescriptor {
    pub mode: ModeDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDescriptor>,
    pub spectrum: Vec<TermDescriptor>,
}

impl InstanceDescriptor {
    pub fn to_instance(&self) -> Result<ExclusionInstance, DescriptorError> {
        let terms: Vec<SpectrumTerm> = self
            .spectrum
            .iter()
            .map(|t| SpectrumTerm {
                label: t.label.clone(),
                irrep_dim: t.irrep_dim,
                multiplicity: t.multiplicity,
                amplitude: c(t.amplitude[0], t.amplitude[1]),
            })
            .collect();
        let spectrum = BlockSpectrum::new(terms)?;
        match self.mode {
            ModeDescriptor::BlockLevel => {
                if self.group.is_some() {
                    return Err(DescriptorError::GroupForbidden);
                }
                Ok(ExclusionInstance::block_level(spectrum)?)
            }
            ModeDescriptor::Explicit => {
                let group = self.group.as_ref().ok_or(DescriptorError::GroupRequired)?;
                let rep = group.to_rep()?;
                Ok(ExclusionInstance::from_spectrum(&rep, spectrum)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::Mode;

    #[test]
    fn cyclic_group_roundtrip() {
        let json = r#"{"kind":"cyclic","order":4}"#;
        let d: GroupDescriptor = serde_json::from_str(json).unwrap();
        assert_eq!(d, GroupDescriptor::Cyclic { order: 4 });
        let g = d.to_group().unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(serde_json::to_string(&d).unwrap(), json);
    }

    #[test]
    fn product_group_builds_left_to_right() {
        let d = GroupDescriptor::Product { factors: vec![2, 3] };
        let g = d.to_group().unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_abelian());
        let empty = GroupDescriptor::Product { factors: vec![] };
        assert!(matches!(empty.to_group(), Err(DescriptorError::Group(_))));
    }

    #[test]
    fn explicit_cayley_is_validated() {
        let d = GroupDescriptor::Explicit { cayley: vec![vec![0, 1], vec![1, 0]] };
        assert_eq!(d.to_group().unwrap().order(), 2);
        let broken = GroupDescriptor::Explicit { cayley: vec![vec![0, 1], vec![0, 1]] };
        assert!(matches!(broken.to_group(), Err(DescriptorError::Group(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = r#"{"kind":"cyclic","order":4,"extra":1}"#;
        assert!(serde_json::from_str::<GroupDescriptor>(json).is_err());
        let json = r#"{"mode":"explicit","spectrum":[],"bogus":true}"#;
        assert!(serde_json::from_str::<InstanceDescriptor>(json).is_err());
        let json = r#"{"label":"chi0","amplitude":[1.0,0.0],"phase":3}"#;
        assert!(serde_json::from_str::<TermDescriptor>(json).is_err());
    }

    #[test]
    fn explicit_instance_from_json() {
        let json = r#"{
            "mode": "explicit",
            "group": {"kind": "cyclic", "order": 2},
            "spectrum": [
                {"label": "chi0", "amplitude": [0.7071067811865476, 0.0]},
                {"label": "chi1", "amplitude": [0.0, 0.7071067811865476]}
            ]
        }"#;
        let d: InstanceDescriptor = serde_json::from_str(json).unwrap();
        let instance = d.to_instance().unwrap();
        assert_eq!(instance.mode(), Mode::Explicit);
        assert_eq!(instance.dim(), 2);
        assert_eq!(instance.group().unwrap().order(), 2);
    }

    #[test]
    fn block_level_instance_from_json() {
        let json = r#"{
            "mode": "block_level",
            "spectrum": [
                {"label": "a", "irrep_dim": 2, "multiplicity": 2, "amplitude": [0.8, 0.0]},
                {"label": "b", "irrep_dim": 1, "multiplicity": 1, "amplitude": [0.6, 0.0]}
            ]
        }"#;
        let d: InstanceDescriptor = serde_json::from_str(json).unwrap();
        let instance = d.to_instance().unwrap();
        assert_eq!(instance.mode(), Mode::BlockLevel);
        assert_eq!(instance.dim(), 5);
    }

    #[test]
    fn mode_group_consistency() {
        let with_group = InstanceDescriptor {
            mode: ModeDescriptor::BlockLevel,
            group: Some(GroupDescriptor::Cyclic { order: 2 }),
            spectrum: vec![TermDescriptor {
                label: "a".to_string(),
                irrep_dim: 1,
                multiplicity: 1,
                amplitude: [1.0, 0.0],
            }],
        };
        assert!(matches!(with_group.to_instance(), Err(DescriptorError::GroupForbidden)));
        let missing = InstanceDescriptor {
            mode: ModeDescriptor::Explicit,
            group: None,
            spectrum: vec![TermDescriptor {
                label: "chi0".to_string(),
                irrep_dim: 1,
                multiplicity: 1,
                amplitude: [1.0, 0.0],
            }],
        };
        assert!(matches!(missing.to_instance(), Err(DescriptorError::GroupRequired)));
    }

    #[test]
    fn pauli_z_descriptor_uses_sign_action() {
        let d = GroupDescriptor::PauliZ { qubits: 2 };
        let rep = d.to_rep().unwrap();
        assert_eq!(rep.dim(), 4);
        assert_eq!(rep.group().order(), 4);
        let over_cap = GroupDescriptor::PauliZ { qubits: 11 };
        assert!(matches!(over_cap.to_rep(), Err(DescriptorError::Group(_))));
    }

    #[test]
    fn spectrum_errors_propagate() {
        let d = InstanceDescriptor {
            mode: ModeDescriptor::Explicit,
            group: Some(GroupDescriptor::Cyclic { order: 2 }),
            spectrum: vec![TermDescriptor {
                label: "chi0".to_string(),
                irrep_dim: 1,
                multiplicity: 1,
                amplitude: [0.5, 0.0],
            }],
        };
        assert!(matches!(
            d.to_instance(),
            Err(DescriptorError::Exclusion(ExclusionError::SpectrumNotNormalized { .. }))
        ));
    }
}
