//! Method of increments: ε(S) = E_c(S) − Σ_{∅ ≠ T ⊊ S} ε(T) and the truncated
//! many-body sum E_c ≈ Σ_{|S| ≤ k} ε(S).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FragmentError;

/// Correlation energies keyed by sorted orbital-index tuples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IncrementTable {
    pub energies: BTreeMap<Vec<usize>, f64>,
}

impl IncrementTable {
    pub fn new() -> IncrementTable {
        IncrementTable::default()
    }

    /// Inserts `E_c(subset)`; the subset is sorted and deduplicated.
    pub fn insert(&mut self, subset: &[usize], energy: f64) {
        self.energies.insert(canonical(subset), energy);
    }

    pub fn get(&self, subset: &[usize]) -> Option<f64> {
        self.energies.get(&canonical(subset)).copied()
    }

    pub fn orbitals(&self) -> BTreeSet<usize> {
        self.energies.keys().flatten().copied().collect()
    }

    pub fn max_size(&self) -> usize {
        self.energies.keys().map(Vec::len).max().unwrap_or(0)
    }
}

fn canonical(subset: &[usize]) -> Vec<usize> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// `"(1,3)"`, or `"(2,)"` for singletons.
pub fn format_key(subset: &[usize]) -> String {
    match subset {
        [i] => alloc::format!("({i},)"),
        _ => {
            let parts: Vec<String> = subset.iter().map(|i| alloc::format!("{i}")).collect();
            alloc::format!("({})", parts.join(","))
        }
    }
}

/// Accepts `"(1,3)"`, `"(1, 3)"`, `"(2,)"` and `"(2)"`.
pub fn parse_key(key: &str) -> Result<Vec<usize>, FragmentError> {
    let bad = || FragmentError::BadKey(key.into());
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|k| k.strip_suffix(')'))
        .ok_or_else(bad)?;
    let mut out = Vec::new();
    for (i, part) in inner.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() && i > 0 && i == inner.split(',').count() - 1 {
            continue;
        }
        out.push(part.parse().map_err(|_| bad())?);
    }
    if out.is_empty() {
        return Err(bad());
    }
    let c = canonical(&out);
    if c.len() != out.len() {
        return Err(bad());
    }
    Ok(c)
}

impl Serialize for IncrementTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, f64> = self
            .energies
            .iter()
            .map(|(k, v)| (format_key(k), *v))
            .collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IncrementTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<IncrementTable, D::Error> {
        let m: BTreeMap<String, f64> = BTreeMap::deserialize(d)?;
        let mut t = IncrementTable::new();
        for (k, v) in m {
            let key = parse_key(&k).map_err(D::Error::custom)?;
            if t.energies.insert(key, v).is_some() {
                return Err(D::Error::custom(alloc::format!("duplicate subset '{k}'")));
            }
        }
        Ok(t)
    }
}

/// Proper nonempty subsets of a sorted set.
fn proper_subsets(s: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let full = (1u64 << s.len()) - 1;
    (1..full).map(move |mask| {
        s.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

/// Increments for every subset in the table, by increasing subset size.
pub fn mi_increments(table: &IncrementTable) -> Result<BTreeMap<Vec<usize>, f64>, FragmentError> {
    let mut keys: Vec<&Vec<usize>> = table.energies.keys().collect();
    keys.sort_by_key(|k| k.len());
    let mut eps: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for s in keys {
        if s.len() > 63 {
            return Err(FragmentError::BadKey(format_key(s)));
        }
        let mut e = table.energies[s];
        for t in proper_subsets(s) {
            e -= *eps.get(&t).ok_or(FragmentError::MissingSubset(t))?;
        }
        eps.insert(s.clone(), e);
    }
    Ok(eps)
}

/// Largest k such that every subset of the table's orbitals with at most k
/// elements is present.
pub fn max_complete_order(table: &IncrementTable) -> usize {
    let orbitals: Vec<usize> = table.orbitals().into_iter().collect();
    let n = orbitals.len();
    let mut k = 0;
    'order: while k < n {
        let size = k + 1;
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<usize> = idx.iter().map(|&i| orbitals[i]).collect();
            if !table.energies.contains_key(&subset) {
                break 'order;
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
        k = size;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiRecombination {
    pub order: usize,
    pub energy: f64,
    /// Sum of the tabulated increments above `order`.
    pub truncation_error: f64,
}

pub fn mi_recombine(increments: &BTreeMap<Vec<usize>, f64>, order: usize) -> MiRecombination {
    let mut energy = 0.0;
    let mut dropped = 0.0;
    let mut keys: Vec<(&Vec<usize>, &f64)> = increments.iter().collect();
    keys.sort_by_key(|(k, _)| k.len());
    for (k, e) in keys {
        if k.len() <= order {
            energy += e;
        } else {
            dropped += e;
        }
    }
    MiRecombination {
        order,
        energy,
        truncation_error: dropped,
    }
}
