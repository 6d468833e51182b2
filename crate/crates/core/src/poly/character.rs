use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_table, first_primes, Exponents};
use crate::error::{Error, Result};

/// Where character coordinates live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Torus,
    Polydisk,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Domain::Torus => "torus",
            Domain::Polydisk => "polydisk",
        })
    }
}

/// A point `(χ_1, …, χ_K)` of the truncated torus or polydisk; coordinate
/// `j` is attached to the `j`-th prime.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    coords: Vec<Complex64>,
    domain: Domain,
}

const UNIT_TOL: f64 = 1e-12;

impl Character {
    pub fn torus(coords: Vec<Complex64>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| (c.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(Error::InvalidParameter(format!(
                "torus coordinate {c} is not unimodular"
            )));
        }
        Ok(Self {
            coords,
            domain: Domain::Torus,
        })
    }

    pub fn polydisk(coords: Vec<Complex64>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| c.norm() >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "polydisk coordinate {c} is not inside the unit disk"
            )));
        }
        Ok(Self {
            coords,
            domain: Domain::Polydisk,
        })
    }

    /// Coordinates taken as given; callers guarantee the domain invariant.
    pub(crate) fn from_parts(coords: Vec<Complex64>, domain: Domain) -> Self {
        Self { coords, domain }
    }

    /// The trivial character on `k` primes.
    pub fn ones(k: usize) -> Self {
        Self {
            coords: vec![Complex64::new(1.0, 0.0); k],
            domain: Domain::Torus,
        }
    }

    /// `χ_j = p_j^{−it}`: the vertical translation by `it`.
    pub fn vertical(t: f64, k: usize) -> Self {
        let coords = first_primes(k)
            .iter()
            .map(|&p| Complex64::from_polar(1.0, -t * (p as f64).ln()))
            .collect();
        Self {
            coords,
            domain: Domain::Torus,
        }
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn conj(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c.conj()).collect(),
            domain: self.domain,
        }
    }

    /// `χ(n) = Π χ_j^{α_j}` for a factored index.
    pub fn at_exponents(&self, e: &Exponents) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &(i, a) in e.entries() {
            let c = self
                .coords
                .get(i as usize - 1)
                .ok_or(Error::InsufficientCharacter {
                    have: self.k(),
                    need: i as usize,
                    index: e.value().unwrap_or(0) as usize,
                })?;
            acc *= c.powu(a);
        }
        Ok(acc)
    }

    /// `χ(n)`.
    pub fn at(&self, n: usize) -> Result<Complex64> {
        let t = factor_table(n);
        let mut acc = Complex64::new(1.0, 0.0);
        let mut missing = None;
        t.for_each_factor(n, |i, a| match self.coords.get(i as usize - 1) {
            Some(c) => acc *= c.powu(a),
            None => missing = Some(i as usize),
        });
        match missing {
            Some(need) => Err(Error::InsufficientCharacter {
                have: self.k(),
                need,
                index: n,
            }),
            None => Ok(acc),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_checks() {
        assert!(Character::torus(vec![Complex64::new(0.6, 0.8)]).is_ok());
        assert!(Character::torus(vec![Complex64::new(0.5, 0.0)]).is_err());
        assert!(Character::polydisk(vec![Complex64::new(0.5, 0.0)]).is_ok());
        assert!(Character::polydisk(vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn completely_multiplicative() {
        let chi =
            Character::torus(vec![Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)]).unwrap();
        assert_eq!(
            chi.at(12).unwrap(),
            Complex64::new(0.0, 1.0).powu(2) * Complex64::new(-1.0, 0.0)
        );
        assert!(matches!(
            chi.at(5),
            Err(Error::InsufficientCharacter { need: 3, .. })
        ));
    }
}
