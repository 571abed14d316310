//! Qubit-wise commuting measurement groups and shot budgets.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::operator::{PauliWord, QubitOperator};
use crate::rng;
use crate::simulator::{expectation_from_frequencies_oneterm, Histogram, SimulatorError};

/// Parent basis -> the terms measured in it.
pub type MeasurementMap = BTreeMap<PauliWord, QubitOperator>;

/// Parent basis -> term -> shots.
pub type ShotPlan = BTreeMap<PauliWord, BTreeMap<PauliWord, u64>>;

/// Qubit-wise union of two compatible words.
fn merge(a: &PauliWord, b: &PauliWord) -> PauliWord {
    let mut f: Vec<_> = a.factors().to_vec();
    f.extend(b.factors().iter().filter(|(q, _)| a.axis(*q).is_none()));
    PauliWord::new(f).expect("compatible words share axes on common qubits")
}

/// Greedy clique cover of the qubit-wise compatibility graph.
///
/// Terms are visited by decreasing weight, ties in an order shuffled with
/// `seed`; each term joins the earliest-created group whose parent it is
/// compatible with, widening the parent, or opens a new group.
pub fn group_qwc(op: &QubitOperator, seed: u64) -> MeasurementMap {
    let mut words: Vec<&PauliWord> = op.words().filter(|w| !w.is_identity()).collect();
    let mut rng = rng::stream(seed, "grouping", 0);
    words.shuffle(&mut rng);
    // stable sort keeps the shuffled order among equal weights
    words.sort_by_key(|w| core::cmp::Reverse(w.len()));

    let mut groups: Vec<(PauliWord, Vec<&PauliWord>)> = Vec::new();
    for w in words {
        match groups
            .iter_mut()
            .find(|(parent, _)| parent.qwc_compatible(w))
        {
            Some((parent, members)) => {
                *parent = merge(parent, w);
                members.push(w);
            }
            None => groups.push((w.clone(), alloc::vec![w])),
        }
    }
    groups
        .into_iter()
        .map(|(parent, members)| {
            let sub = QubitOperator::from_terms(
                members.into_iter().map(|w| (w.clone(), op.coefficient(w))),
            );
            (parent, sub)
        })
        .collect()
}

/// Shots needed per term so that `|Re c| / sqrt(shots)` is at most
/// `10^-(digits+1)`. The identity needs none; any other nonzero term gets at
/// least one shot.
pub fn get_measurement_estimate(op: &QubitOperator, digits: u32) -> BTreeMap<PauliWord, u64> {
    let scale = libm::pow(10.0, (digits + 1) as f64);
    op.iter()
        .map(|(w, c)| {
            let shots = if w.is_identity() || c.norm() == 0.0 {
                0
            } else {
                let raw = libm::pow(libm::fabs(c.re) * scale, 2.0);
                // absorb float overshoot such as 62500.00000000001
                (libm::ceil(raw - raw * 1e-12) as u64).max(1)
            };
            (w.clone(), shots)
        })
        .collect()
}

pub fn plan_measurements(op: &QubitOperator, seed: u64, digits: u32) -> ShotPlan {
    group_qwc(op, seed)
        .iter()
        .map(|(parent, members)| (parent.clone(), get_measurement_estimate(members, digits)))
        .collect()
}

/// Shots needed when each group is run at its most demanding member's count.
pub fn plan_total_shots(plan: &ShotPlan) -> u64 {
    plan.values()
        .map(|m| m.values().copied().max().unwrap_or(0))
        .sum()
}

/// True when measuring in `parent` determines `word` (same axis on each of its qubits).
pub fn covers(parent: &PauliWord, word: &PauliWord) -> bool {
    word.factors()
        .iter()
        .all(|&(q, a)| parent.axis(q) == Some(a))
}

/// Every basis in `bases` from which `word` can be estimated.
pub fn compatible_parents<'a>(
    word: &PauliWord,
    bases: impl IntoIterator<Item = &'a PauliWord>,
) -> Vec<PauliWord> {
    bases
        .into_iter()
        .filter(|p| covers(p, word))
        .cloned()
        .collect()
}

/// Shot-weighted average of the estimates from every covering basis.
/// Returns `None` when no basis covers the word.
pub fn pooled_expectation(
    word: &PauliWord,
    data: &[(PauliWord, Histogram, u64)],
) -> Result<Option<f64>, SimulatorError> {
    let mut num = 0.0;
    let mut den = 0u64;
    for (parent, hist, shots) in data {
        if covers(parent, word) {
            num += *shots as f64 * expectation_from_frequencies_oneterm(word, hist)?;
            den += shots;
        }
    }
    Ok((den > 0).then(|| num / den as f64))
}

/// Estimates each word from the first covering basis (in key order), or from
/// all covering bases pooled by shot count when `shots` is given.
pub fn expectations_from_histograms<'a>(
    words: impl IntoIterator<Item = &'a PauliWord>,
    histograms: &BTreeMap<PauliWord, Histogram>,
    shots: Option<&BTreeMap<PauliWord, u64>>,
) -> Result<BTreeMap<PauliWord, f64>, SimulatorError> {
    let mut out = BTreeMap::new();
    for w in words {
        if w.is_identity() {
            out.insert(w.clone(), 1.0);
            continue;
        }
        let value = match shots {
            Some(shots) => {
                let data: Vec<_> = histograms
                    .iter()
                    .map(|(p, h)| (p.clone(), h.clone(), shots.get(p).copied().unwrap_or(1)))
                    .collect();
                pooled_expectation(w, &data)?
            }
            None => match histograms.iter().find(|(p, _)| covers(p, w)) {
                Some((_, h)) => Some(expectation_from_frequencies_oneterm(w, h)?),
                None => None,
            },
        };
        if let Some(v) = value {
            out.insert(w.clone(), v);
        }
    }
    Ok(out)
}
