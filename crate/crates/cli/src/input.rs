//! Reading files, inline sets and budgets.

use std::io::Read;
use std::sync::Arc;

use vjac::degposet::{validate_degset, DegeneracySubset, DEFAULT_SEARCH_BUDGET};
use vjac::domain::Mask;
use vjac::json::{degset_from_json, GroupElementJson, PolarizationJson, VFunctionJson};
use vjac::polarization::RationalPolarization;
use vjac::symmetry::{GroupElement, DEFAULT_ENUM_BUDGET};
use vjac::vfunction::DEFAULT_UPSET_BUDGET;
use vjac::{Error, Result, StabilityDomain, VFunction};

const DEFAULT_BFS_BUDGET: u64 = 2_000_000;

/// Search caps; `VJAC_BUDGET` or `--budget` replaces all of them.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    pub enumerate: u64,
    pub search: u64,
    pub upset: u64,
    pub bfs: usize,
}

impl Budgets {
    pub fn from_env(flag: Option<u64>) -> Result<Self> {
        let env = match std::env::var("VJAC_BUDGET") {
            Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| Error::Parse(format!("VJAC_BUDGET={v:?} is not a count")))?),
            Err(_) => None,
        };
        Ok(match flag.or(env) {
            Some(b) => Budgets { enumerate: b, search: b, upset: b, bfs: b as usize },
            None => Budgets {
                enumerate: DEFAULT_ENUM_BUDGET,
                search: DEFAULT_SEARCH_BUDGET,
                upset: DEFAULT_UPSET_BUDGET,
                bfs: DEFAULT_BFS_BUDGET as usize,
            },
        })
    }
}

/// File contents, or standard input for `-`.
pub fn read_text(path: &str) -> Result<String> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    }
    Ok(s)
}

/// Inline JSON when the argument starts with `[` or `{`, otherwise a file.
fn inline_or_file(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        Ok(arg.to_string())
    } else {
        read_text(arg)
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn read_vfunction(path: &str) -> Result<VFunction> {
    let j: VFunctionJson = parse_json(&read_text(path)?, path)?;
    let d = Arc::new(StabilityDomain::new(j.g, j.n)?);
    j.to_vfunction(d)
}

/// Reads onto an existing domain, failing when the file has another type.
pub fn read_vfunction_on(path: &str, d: Arc<StabilityDomain>) -> Result<VFunction> {
    let j: VFunctionJson = parse_json(&read_text(path)?, path)?;
    j.to_vfunction(d)
}

pub fn read_polarization(path: &str, d: &StabilityDomain) -> Result<RationalPolarization> {
    let j: PolarizationJson = parse_json(&inline_or_file(path)?, path)?;
    j.to_polarization(d)
}

pub fn read_group(arg: &str, d: &StabilityDomain) -> Result<GroupElement> {
    let j: GroupElementJson = parse_json(&inline_or_file(arg)?, arg)?;
    let t = j.to_group_element(d)?;
    t.check(d)?;
    Ok(t)
}

/// A degeneracy subset as a JSON index array, inline or in a file.
pub fn parse_set(arg: &str, d: Arc<StabilityDomain>) -> Result<DegeneracySubset> {
    let idx: Vec<usize> = parse_json(&inline_or_file(arg)?, arg)?;
    degset_from_json(d, &idx)
}

/// Comma-separated mark sets written as digit strings, e.g. `123,145`.
pub fn parse_mark_sets(s: &str) -> Result<Vec<Mask>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.chars().try_fold(0 as Mask, |m, c| match c.to_digit(10) {
                Some(k) if (1..=9).contains(&k) => Ok(m | 1 << (k - 1)),
                _ => Err(Error::Parse(format!("{t:?} is not a set of marks 1..9"))),
            })
        })
        .collect()
}

/// All complement- and triangle-closed subsets of the non-separating part.
pub fn closed_ns_subsets(d: &Arc<StabilityDomain>) -> Vec<DegeneracySubset> {
    let prims = d.primitives();
    (0u64..(1 << prims.len()))
        .map(|m| {
            let pick: Vec<usize> = (0..prims.len()).filter(|&k| m >> k & 1 == 1).map(|k| prims[k]).collect();
            DegeneracySubset::from_pairs(d.clone(), &pick)
        })
        .filter(|s| validate_degset(s).is_ok())
        .collect()
}
