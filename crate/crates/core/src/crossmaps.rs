//! Maps between V-functions (and polarizations) of types `(g,n)` and `(g,n+1)`.

use std::sync::Arc;

use num_traits::Zero;

use crate::domain::{is_stable_type, varpi, xi, ExtendedDomain, HalfVineType, StabilityDomain};
use crate::error::{Error, Result};
use crate::feasibility::Rat;
use crate::polarization::RationalPolarization;
use crate::vfunction::VFunction;

/// Image of an upper element under `ϖ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarpiImage {
    /// Index in the lower stability domain.
    Lower(usize),
    /// An element of the extended domain outside the stability domain.
    Extra(HalfVineType),
}

/// The domains of types `(g,n)` and `(g,n+1)` with `ξ_i` and `ϖ` as index maps.
#[derive(Clone, Debug)]
pub struct LevelPair {
    pub lower: Arc<StabilityDomain>,
    pub upper: Arc<StabilityDomain>,
    pub extended: ExtendedDomain,
    /// `xi[i-1][k]`: upper index of `ξ_i` of lower element `k`.
    pub xi: Vec<Vec<usize>>,
    pub varpi: Vec<VarpiImage>,
}

impl LevelPair {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        let lower = Arc::new(StabilityDomain::new(g, n)?);
        let upper = Arc::new(StabilityDomain::new(g, n + 1)?);
        Self::from_domains(lower, upper)
    }

    pub fn from_domains(lower: Arc<StabilityDomain>, upper: Arc<StabilityDomain>) -> Result<Self> {
        if lower.g() != upper.g() || lower.n() + 1 != upper.n() {
            return Err(Error::DomainMismatch(format!(
                "({},{}) and ({},{}) are not consecutive levels",
                lower.g(),
                lower.n(),
                upper.g(),
                upper.n()
            )));
        }
        let extended = ExtendedDomain::new(lower.g(), lower.n())?;
        let mut xi_maps = Vec::new();
        for i in 1..=lower.n() {
            let map = lower
                .elements()
                .iter()
                .map(|x| upper.require(&xi(&lower, i, x)?))
                .collect::<Result<Vec<_>>>()?;
            xi_maps.push(map);
        }
        let varpi_map = upper
            .elements()
            .iter()
            .map(|y| {
                let x = varpi(&upper, y)?;
                Ok(match lower.index_of(&x) {
                    Some(k) => VarpiImage::Lower(k),
                    None if extended.is_extra(&x) => VarpiImage::Extra(x),
                    None => return Err(Error::NotInDomain { elem: x.label(lower.n()), g: lower.g(), n: lower.n() }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelPair { lower, upper, extended, xi: xi_maps, varpi: varpi_map })
    }

    fn check_lower(&self, f: &VFunction) -> Result<()> {
        if **f.domain() != *self.lower {
            return Err(Error::DomainMismatch("function is not on the lower domain".into()));
        }
        Ok(())
    }

    fn check_upper(&self, f: &VFunction) -> Result<()> {
        if **f.domain() != *self.upper {
            return Err(Error::DomainMismatch("function is not on the upper domain".into()));
        }
        Ok(())
    }

    /// `σ̂`: `σ` on the stability domain, `0` where `δ = 0` and `χ` on the complements.
    fn hat(&self, sigma: &VFunction, y: usize) -> i64 {
        match self.varpi[y] {
            VarpiImage::Lower(k) => sigma.value(k),
            VarpiImage::Extra(x) => {
                if x.delta() == 0 {
                    0
                } else {
                    sigma.chi()
                }
            }
        }
    }

    /// `Ξ_i(τ) = τ ∘ ξ_i`.
    pub fn big_xi(&self, i: u32, tau: &VFunction) -> Result<VFunction> {
        self.check_upper(tau)?;
        if i == 0 || i > self.lower.n() {
            return Err(Error::InvalidArgument(format!("mark index {i} outside 1..={}", self.lower.n())));
        }
        let map = &self.xi[i as usize - 1];
        VFunction::new(self.lower.clone(), tau.chi(), map.iter().map(|&k| tau.value(k)).collect())
    }

    /// `Ω(σ) = σ̂ ∘ ϖ`.
    pub fn omega(&self, sigma: &VFunction) -> Result<VFunction> {
        self.check_lower(sigma)?;
        VFunction::new(self.upper.clone(), sigma.chi(), (0..self.upper.len()).map(|y| self.hat(sigma, y)).collect())
    }

    fn omega_pm(&self, sigma: &VFunction, with_last: bool) -> Result<VFunction> {
        let base = self.omega(sigma)?;
        let last = 1u64 << self.lower.n();
        let delta: Vec<i64> = (0..self.upper.len())
            .map(|y| {
                let has = self.upper.element(y).a & last != 0;
                (base.is_degenerate_at(y) && has == with_last) as i64
            })
            .collect();
        Ok(base.shifted(&delta))
    }

    /// `Ω⁺`: raises the degenerate elements whose marks contain `n+1`.
    pub fn omega_plus(&self, sigma: &VFunction) -> Result<VFunction> {
        self.omega_pm(sigma, true)
    }

    /// `Ω⁻`: raises the degenerate elements whose marks avoid `n+1`.
    pub fn omega_minus(&self, sigma: &VFunction) -> Result<VFunction> {
        self.omega_pm(sigma, false)
    }

    /// Lower elements `x` with `ξ_i(x)` in the given upper set.
    pub fn xi_preimage(&self, i: u32, upper_set: &[usize]) -> Result<Vec<usize>> {
        if i == 0 || i > self.lower.n() {
            return Err(Error::InvalidArgument(format!("mark index {i} outside 1..={}", self.lower.n())));
        }
        let map = &self.xi[i as usize - 1];
        Ok((0..self.lower.len()).filter(|&k| upper_set.contains(&map[k])).collect())
    }

    /// Upper elements whose `ϖ`-image is in the lower set or outside the stability domain.
    pub fn varpi_preimage_with_extra(&self, lower_set: &[usize]) -> Vec<usize> {
        (0..self.upper.len())
            .filter(|&y| match self.varpi[y] {
                VarpiImage::Lower(k) => lower_set.contains(&k),
                VarpiImage::Extra(_) => true,
            })
            .collect()
    }

    /// `Ξ_i` on polarizations: `α_i += α_(n+1)`, `γ_x = γ'_(ξ_i(x))`.
    pub fn xi_pol(&self, i: u32, l: &RationalPolarization) -> Result<RationalPolarization> {
        l.check(&self.upper)?;
        if i == 0 || i > self.lower.n() {
            return Err(Error::InvalidArgument(format!("mark index {i} outside 1..={}", self.lower.n())));
        }
        let n = self.lower.n() as usize;
        let mut alpha = l.alpha[..n].to_vec();
        alpha[i as usize - 1] += &l.alpha[n];
        let map = &self.xi[i as usize - 1];
        let gamma = self
            .lower
            .separating()
            .iter()
            .map(|&x| l.gamma[self.upper.part_position(map[x])].clone())
            .collect();
        Ok(RationalPolarization { beta: l.beta.clone(), alpha, gamma })
    }

    /// `Ω` on polarizations: `α_(n+1) = 0`, old `γ` pulled back along `ϖ`, and
    /// `γ_(0,{j,n+1}) = α_j - β` on the new separating pairs.
    pub fn omega_pol(&self, l: &RationalPolarization) -> Result<RationalPolarization> {
        l.check(&self.lower)?;
        let mut alpha = l.alpha.clone();
        alpha.push(Rat::zero());
        let gamma = self
            .upper
            .separating()
            .iter()
            .map(|&y| match self.varpi[y] {
                VarpiImage::Lower(k) => l.gamma[self.lower.part_position(k)].clone(),
                VarpiImage::Extra(x) => {
                    if x.delta() == 0 {
                        // x = (1;0,{j})
                        let j = x.a.trailing_zeros() as usize;
                        &l.alpha[j] - &l.beta
                    } else {
                        Rat::zero()
                    }
                }
            })
            .collect();
        Ok(RationalPolarization { beta: l.beta.clone(), alpha, gamma })
    }
}

/// Whether `x` lies in the extended domain of type `(g,n)` but not in the stability domain.
pub fn is_extra(g: u32, n: u32, x: &HalfVineType) -> bool {
    crate::domain::is_extended_type(g, n, x) && !is_stable_type(g, n, x)
}
