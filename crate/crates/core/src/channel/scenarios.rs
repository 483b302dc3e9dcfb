use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// The three reference coupling vectors used in the hardening study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingScenario {
    /// `[1, 1, ..., 1]`: power spread evenly over all eigenvectors.
    Uniform = 1,
    /// `[M/2, M/(2M-2), ..., M/(2M-2)]`: half the power in one eigenvector.
    Split = 2,
    /// `[M, 0, ..., 0]`: all power in a single eigenvector.
    Single = 3,
}

impl CouplingScenario {
    pub const ALL: [CouplingScenario; 3] = [Self::Uniform, Self::Split, Self::Single];

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Self::Uniform),
            2 => Ok(Self::Split),
            3 => Ok(Self::Single),
            other => Err(Error::InvalidArgument(format!("unknown coupling scenario {other}"))),
        }
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn coupling(self, m: usize) -> Result<Vec<f64>> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("coupling scenarios need M >= 2, got {m}")));
        }
        let mf = m as f64;
        Ok(match self {
            Self::Uniform => vec![1.0; m],
            Self::Split => {
                let mut w = vec![mf / (2.0 * mf - 2.0); m];
                w[0] = mf / 2.0;
                w
            }
            Self::Single => {
                let mut w = vec![0.0; m];
                w[0] = mf;
                w
            }
        })
    }
}

impl fmt::Display for CouplingScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for CouplingScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("unknown coupling scenario {s:?}")))?;
        Self::from_id(id)
    }
}

pub fn coupling_scenario(id: u8, m: usize) -> Result<Vec<f64>> {
    CouplingScenario::from_id(id)?.coupling(m)
}

/// The block matrices of the rank study, laid out exactly as printed:
///
/// ```text
/// id 1:  [ 1_{M-D,M-D}  0       ]      id 2:  [ 1_{D,M-D}  0         ]
///        [ 0            I_D     ]             [ 0          I_{M-D}   ]
/// ```
///
/// The second layout is not Hermitian (its ones block is `D x (M-D)`), so it
/// is returned as a plain matrix rather than a covariance.
pub fn block_covariance_scenario(id: u8, m: usize, d_rank: usize) -> Result<ComplexMatrix> {
    if m < 2 || d_rank < 1 || d_rank > m - 1 {
        return Err(Error::InvalidArgument(format!(
            "rank parameter D must lie in [1, M-1], got D = {d_rank} with M = {m}"
        )));
    }
    let one = num_complex::Complex64::new(1.0, 0.0);
    let zero = num_complex::Complex64::new(0.0, 0.0);
    match id {
        1 => {
            let k = m - d_rank;
            Ok(ComplexMatrix::from_fn(m, m, |i, j| {
                if (i < k && j < k) || (i >= k && i == j) {
                    one
                } else {
                    zero
                }
            }))
        }
        2 => Ok(ComplexMatrix::from_fn(m, m, |i, j| {
            if (i < d_rank && j < m - d_rank) || (i >= d_rank && i == j) {
                one
            } else {
                zero
            }
        })),
        other => Err(Error::InvalidArgument(format!("unknown block scenario {other}"))),
    }
}

/// The all-ones companion matrix `1_M` (rank one, fully aligned).
pub fn ones_covariance(m: usize) -> ComplexMatrix {
    ComplexMatrix::ones(m, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_vectors() {
        assert_eq!(coupling_scenario(1, 8).unwrap(), vec![1.0; 8]);
        let s2 = coupling_scenario(2, 4).unwrap();
        let expected = [2.0, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        assert!(s2.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!((s2.iter().sum::<f64>() - 4.0).abs() < 1e-14);
        assert_eq!(coupling_scenario(3, 4).unwrap(), vec![4.0, 0.0, 0.0, 0.0]);
        assert!(coupling_scenario(4, 4).is_err());
        assert!(coupling_scenario(1, 1).is_err());
    }

    #[test]
    fn every_scenario_sums_to_m() {
        for s in CouplingScenario::ALL {
            for m in [2, 3, 17, 100, 512] {
                let sum: f64 = s.coupling(m).unwrap().iter().sum();
                assert!((sum - m as f64).abs() <= 1e-12 * m as f64);
            }
        }
    }

    #[test]
    fn scenario_parses() {
        assert_eq!("2".parse::<CouplingScenario>().unwrap(), CouplingScenario::Split);
        assert!("x".parse::<CouplingScenario>().is_err());
    }

    #[test]
    fn block_scenario_one_layout() {
        let q = block_covariance_scenario(1, 4, 2).unwrap();
        let expected = [
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(q[(i, j)].re, expected[i][j]);
            }
        }
        for d in 1..10 {
            let q = block_covariance_scenario(1, 10, d).unwrap();
            assert_eq!(q.trace().unwrap().re, 10.0);
            assert!(q.is_hermitian());
        }
    }

    #[test]
    fn block_scenario_two_layout() {
        let q = block_covariance_scenario(2, 4, 1).unwrap();
        let expected = [
            [1.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(q[(i, j)].re, expected[i][j], "({i},{j})");
            }
        }
        assert!(!q.is_hermitian());
    }

    #[test]
    fn block_scenario_range_checks() {
        assert!(block_covariance_scenario(1, 4, 0).is_err());
        assert!(block_covariance_scenario(1, 4, 4).is_err());
        assert!(block_covariance_scenario(3, 4, 1).is_err());
    }
}
