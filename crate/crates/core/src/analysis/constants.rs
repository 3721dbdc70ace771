use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the WOMP instance-optimality guarantee for a given
/// weakness parameter: with `δ_{(A+1)n} <= δ*`, `A n` steps give
/// `‖f - f_{An}‖ <= C σ_n(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub kappa: f64,
    pub delta_star: f64,
    /// `⌈4 κ⁻²⌉`, repetitions when the missing set has two or more atoms.
    pub l1: u64,
    /// `⌈6 κ⁻²⌉`, repetitions when exactly one atom is missing.
    pub l2: u64,
    /// `26 ⌈4 κ⁻²⌉`.
    pub a: u64,
    pub c: f64,
}

impl TheoremConstants {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::InvalidKappa(kappa));
        }
        let inv2 = 1.0 / (kappa * kappa);
        let l1 = (4.0 * inv2).ceil() as u64;
        let l2 = (6.0 * inv2).ceil() as u64;
        Ok(Self {
            kappa,
            delta_star: 1.0 / 6.0,
            l1,
            l2,
            a: 26 * l1,
            c: 8.0,
        })
    }

    /// Number of greedy steps `A n`.
    pub fn steps(&self, n: usize) -> usize {
        self.a as usize * n
    }

    /// RIP order `(A+1) n` the hypothesis is stated at.
    pub fn rip_order(&self, n: usize) -> usize {
        (self.a as usize + 1) * n
    }

    /// Constant of the top-`n` postprocessed output,
    /// `2 + 3 (C+2) sqrt((1+δ)/(1-δ))`.
    pub fn postprocessing_constant(&self, delta: f64) -> f64 {
        2.0 + 3.0 * (self.c + 2.0) * ((1.0 + delta) / (1.0 - delta)).sqrt()
    }
}

pub fn theorem_constants(kappa: f64) -> Result<TheoremConstants> {
    TheoremConstants::new(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omp_constants() {
        let c = theorem_constants(1.0).unwrap();
        assert_eq!((c.l1, c.l2, c.a), (4, 6, 104));
        assert_eq!(c.c, 8.0);
        assert_eq!(c.delta_star, 1.0 / 6.0);
        assert!(c.a as f64 >= 52.0);
        assert_eq!(c.steps(2), 208);
        assert_eq!(c.rip_order(2), 210);
    }

    #[test]
    fn half_weak_constants() {
        let c = theorem_constants(0.5).unwrap();
        assert_eq!((c.l1, c.l2, c.a), (16, 24, 416));
        assert_eq!(c.c, 8.0);
    }

    #[test]
    fn postprocessing_constant_at_zero_delta() {
        let c = theorem_constants(1.0).unwrap();
        assert_eq!(c.postprocessing_constant(0.0), 32.0);
    }

    #[test]
    fn invalid_kappa() {
        for k in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(theorem_constants(k), Err(Error::InvalidKappa(_))));
        }
    }
}
