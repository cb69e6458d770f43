//! Chain parameters, the pseudomomentum grid and the free-fermion
//! quasiparticle data (gap and Bogoliubov angle) shared by every phase
//! computation.
//!
//! Energies are in units of the exchange coupling.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// An XY chain of `n_sites` spins with anisotropy `alpha`, optionally
/// rotated by `phi` about the field axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    alpha: f64,
    phi: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, alpha: f64) -> Result<Self> {
        Self::with_rotation(n_sites, alpha, 0.0)
    }

    pub fn with_rotation(n_sites: usize, alpha: f64, phi: f64) -> Result<Self> {
        if n_sites < 2 || n_sites % 2 != 0 {
            return Err(Error::InvalidChainSize(n_sites));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidAnisotropy(alpha));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("rotation angle {phi}")));
        }
        Ok(Self { n_sites, alpha, phi })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Number of `(k, -k)` pairs, `N / 2`.
    pub fn n_pairs(&self) -> usize {
        self.n_sites / 2
    }

    /// The smallest positive momentum `pi / N`, i.e. the minimum-gap mode.
    pub fn k0(&self) -> f64 {
        PI / self.n_sites as f64
    }

    pub fn momenta(&self) -> Vec<f64> {
        grid(self.n_sites)
    }

    /// Quasiparticle data for every positive momentum at field `field`.
    pub fn modes(&self, field: f64) -> Result<Vec<Mode>> {
        self.momenta()
            .into_iter()
            .map(|k| Mode::new(k, field, self.alpha))
            .collect()
    }

    /// Index of `k` on the grid, accepting a few ulps of rounding.
    pub fn grid_index(&self, k: f64) -> Option<usize> {
        let n = self.n_sites as f64;
        // k = (2m - 1) pi / N  <=>  m = (k N / pi + 1) / 2
        let m = (k.abs() * n / PI + 1.0) / 2.0;
        let m_round = m.round();
        if m_round < 1.0 || m_round > self.n_pairs() as f64 {
            return None;
        }
        let on_grid = (2.0 * m_round - 1.0) * PI / n;
        if (on_grid - k.abs()).abs() <= 1e-12 * PI {
            Some(m_round as usize - 1)
        } else {
            None
        }
    }
}

/// One momentum mode at a fixed field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub k: f64,
    pub lambda_k: f64,
    pub cos_theta_k: f64,
}

impl Mode {
    pub fn new(k: f64, field: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            k,
            lambda_k: dispersion(k, field, alpha),
            cos_theta_k: bogoliubov_angle(k, field, alpha)?,
        })
    }
}

/// Positive half-integer pseudomomenta `k = (2m - 1) pi / N`, `m = 1..=N/2`.
pub fn momentum_grid(n_sites: usize) -> Result<Vec<f64>> {
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::InvalidChainSize(n_sites));
    }
    Ok(grid(n_sites))
}

fn grid(n_sites: usize) -> Vec<f64> {
    let n = n_sites as f64;
    (1..=n_sites / 2)
        .map(|m| (2 * m - 1) as f64 * PI / n)
        .collect()
}

/// Quasiparticle gap `sqrt((cos k - B)^2 + alpha^2 sin^2 k)`.
pub fn dispersion(k: f64, field: f64, alpha: f64) -> f64 {
    let (sin_k, cos_k) = k.sin_cos();
    (cos_k - field).hypot(alpha * sin_k)
}

/// `cos(theta_k) = (cos k - B) / Lambda_k`.
///
/// Fails with [`Error::Gapless`] where the gap vanishes, since the angle is
/// undefined there.
pub fn bogoliubov_angle(k: f64, field: f64, alpha: f64) -> Result<f64> {
    let lambda = dispersion(k, field, alpha);
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Gapless { k, field });
    }
    Ok(((k.cos() - field) / lambda).clamp(-1.0, 1.0))
}
