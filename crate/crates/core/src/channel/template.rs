use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ula_steering, CouplingScenario, UserChannelSpec};
use crate::error::Result;
use crate::numerics::{haar_unitary, ComplexMatrix};

/// How a template picks the eigenbasis `U` once `M` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Identity,
    Haar,
}

/// A user spec with `M` left open: coupling scenario, K-factor and a ULA
/// line-of-sight angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTemplate {
    pub k_factor: f64,
    pub coupling: CouplingScenario,
    /// Arrival angle of the LoS path, radians.
    pub los_angle: f64,
    /// Element spacing in wavelengths.
    pub spacing: f64,
    pub basis: BasisKind,
}

impl ChannelTemplate {
    /// Builds the spec for `m` antennas. `rng` is only consumed for a Haar basis.
    pub fn instantiate<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<UserChannelSpec> {
        let eigenbasis = match self.basis {
            BasisKind::Identity => ComplexMatrix::identity(m),
            BasisKind::Haar => haar_unitary(m, rng)?,
        };
        UserChannelSpec::new(
            self.k_factor,
            eigenbasis,
            self.coupling.coupling(m)?,
            ula_steering(m, self.los_angle, self.spacing)?,
        )
    }
}
