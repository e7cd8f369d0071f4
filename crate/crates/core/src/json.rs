//! JSON interchange formats.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::degposet::DegeneracySubset;
use crate::domain::{marks_to_mask, HalfVineType, StabilityDomain};
use crate::error::{Error, Result};
use crate::feasibility::Rat;
use crate::polarization::RationalPolarization;
use crate::symmetry::{CanonicalKey, GroupElement};
use crate::vfunction::VFunction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub e: u32,
    pub h: u32,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
}

impl ElementJson {
    pub fn of(x: &HalfVineType) -> Self {
        ElementJson { e: x.e, h: x.h, a: x.marks() }
    }

    pub fn to_type(&self) -> Result<HalfVineType> {
        HalfVineType::with_marks(self.e, self.h, &self.a).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainJson {
    pub g: u32,
    pub n: u32,
    pub elements: Vec<ElementJson>,
    pub triangles: Vec<[usize; 3]>,
}

impl DomainJson {
    pub fn of(d: &StabilityDomain) -> Self {
        DomainJson {
            g: d.g(),
            n: d.n(),
            elements: d.elements().iter().map(ElementJson::of).collect(),
            triangles: d.triangles().iter().map(|t| t.0).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueJson {
    pub e: u32,
    pub h: u32,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    pub sigma: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VFunctionJson {
    pub g: u32,
    pub n: u32,
    pub chi: i64,
    pub values: Vec<ValueJson>,
}

impl VFunctionJson {
    pub fn of(f: &VFunction) -> Self {
        let d = f.domain();
        VFunctionJson {
            g: d.g(),
            n: d.n(),
            chi: f.chi(),
            values: d
                .elements()
                .iter()
                .zip(f.values())
                .map(|(x, &v)| ValueJson { e: x.e, h: x.h, a: x.marks(), sigma: v })
                .collect(),
        }
    }

    /// Canonicalizes the order; rejects unknown, repeated or missing elements.
    pub fn to_vfunction(&self, d: Arc<StabilityDomain>) -> Result<VFunction> {
        if d.g() != self.g || d.n() != self.n {
            return Err(Error::DomainMismatch(format!("file has type ({},{})", self.g, self.n)));
        }
        let mut values = vec![None; d.len()];
        for v in &self.values {
            let x = HalfVineType::with_marks(v.e, v.h, &v.a).map_err(|e| Error::Parse(e.to_string()))?;
            let i = d.index_of(&x).ok_or_else(|| Error::Parse(format!("unknown element {}", x.label(d.n()))))?;
            if values[i].replace(v.sigma).is_some() {
                return Err(Error::Parse(format!("element {} given twice", x.label(d.n()))));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value at {}", d.element(i).label(d.n())))))
            .collect::<Result<Vec<_>>>()?;
        VFunction::new(d, self.chi, values)
    }
}

/// A rational as `{"num": .., "den": ..}` with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: serde_json::Number,
    pub den: serde_json::Number,
}

fn big_of(n: &serde_json::Number) -> Result<BigInt> {
    n.to_string().parse::<BigInt>().map_err(|_| Error::Parse(format!("{n} is not an integer")))
}

impl RatJson {
    pub fn of(q: &Rat) -> Self {
        let num = q.numer().to_string().parse().expect("integer literal");
        let den = q.denom().to_string().parse().expect("integer literal");
        RatJson { num, den }
    }

    pub fn to_rat(&self) -> Result<Rat> {
        let num = big_of(&self.num)?;
        let den = big_of(&self.den)?;
        if den.is_zero() || den.is_negative() {
            return Err(Error::Parse("denominator must be positive".into()));
        }
        Ok(Rat::new(num, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaJson<T> {
    pub h: u32,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub beta: RatJson,
    pub alpha: Vec<RatJson>,
    #[serde(default)]
    pub gamma: Vec<GammaJson<RatJson>>,
}

/// Index of `(1;h,A)` inside the separating list.
fn gamma_slot(d: &StabilityDomain, h: u32, a: &[u32]) -> Result<usize> {
    let x = HalfVineType::new(1, h, marks_to_mask(a).map_err(|e| Error::Parse(e.to_string()))?);
    let i = d.index_of(&x).ok_or_else(|| Error::Parse(format!("gamma index {} is not separating", x.label(d.n()))))?;
    Ok(d.part_position(i))
}

impl PolarizationJson {
    pub fn of(l: &RationalPolarization, d: &StabilityDomain) -> Self {
        PolarizationJson {
            g: Some(d.g()),
            n: Some(d.n()),
            beta: RatJson::of(&l.beta),
            alpha: l.alpha.iter().map(RatJson::of).collect(),
            gamma: d
                .separating()
                .iter()
                .zip(&l.gamma)
                .filter(|(_, v)| !v.is_zero())
                .map(|(&i, v)| {
                    let x = d.element(i);
                    GammaJson { h: x.h, a: x.marks(), value: RatJson::of(v) }
                })
                .collect(),
        }
    }

    /// Missing `γ` entries default to 0.
    pub fn to_polarization(&self, d: &StabilityDomain) -> Result<RationalPolarization> {
        if self.g.is_some_and(|g| g != d.g()) || self.n.is_some_and(|n| n != d.n()) {
            return Err(Error::DomainMismatch("polarization file is for another type".into()));
        }
        let mut gamma = vec![Rat::zero(); d.separating().len()];
        for c in &self.gamma {
            gamma[gamma_slot(d, c.h, &c.a)?] = c.value.to_rat()?;
        }
        Ok(RationalPolarization {
            beta: self.beta.to_rat()?,
            alpha: self.alpha.iter().map(RatJson::to_rat).collect::<Result<_>>()?,
            gamma,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElementJson {
    #[serde(default)]
    pub beta: i64,
    #[serde(default)]
    pub alpha: Vec<i64>,
    #[serde(default)]
    pub gamma: Vec<GammaJson<i64>>,
    #[serde(default)]
    pub epsilon: u8,
}

impl GroupElementJson {
    pub fn of(t: &GroupElement, d: &StabilityDomain) -> Self {
        GroupElementJson {
            beta: t.beta,
            alpha: t.alpha.clone(),
            gamma: d
                .separating()
                .iter()
                .zip(&t.gamma)
                .filter(|(_, &v)| v != 0)
                .map(|(&i, &v)| {
                    let x = d.element(i);
                    GammaJson { h: x.h, a: x.marks(), value: v }
                })
                .collect(),
            epsilon: t.epsilon as u8,
        }
    }

    /// An empty `alpha` means all zeros.
    pub fn to_group_element(&self, d: &StabilityDomain) -> Result<GroupElement> {
        if self.epsilon > 1 {
            return Err(Error::Parse("epsilon must be 0 or 1".into()));
        }
        let alpha = if self.alpha.is_empty() { vec![0; d.n() as usize] } else { self.alpha.clone() };
        let mut gamma = vec![0; d.separating().len()];
        for c in &self.gamma {
            gamma[gamma_slot(d, c.h, &c.a)?] = c.value;
        }
        Ok(GroupElement { beta: self.beta, alpha, gamma, epsilon: self.epsilon == 1 })
    }
}

/// Degeneracy subsets as sorted index arrays.
pub fn degset_json(s: &DegeneracySubset) -> Vec<usize> {
    s.indices()
}

pub fn degset_from_json(d: Arc<StabilityDomain>, idx: &[usize]) -> Result<DegeneracySubset> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= d.len()) {
        return Err(Error::Parse(format!("index {bad} outside the domain of {} elements", d.len())));
    }
    Ok(DegeneracySubset::from_indices(d, idx))
}

/// Canonical keys as `[chi, [ns values], [separating pair indices]]`.
pub fn key_json(k: &CanonicalKey) -> serde_json::Value {
    serde_json::json!([k.chi, k.ns, k.s_degenerate])
}

/// Parses `p`, `-p` or `p/q` with `q > 0`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("{s:?} is not a rational number"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if !q.is_positive() {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

/// Inverse of [`parse_rat`].
pub fn format_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
