use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::SimulatorError;
use crate::circuit::Gate;
use crate::rng::unit_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// With probability p, a uniformly random non-identity Pauli word on the
    /// gate's qubits. On one qubit this shrinks <Z> by (1 - 4p/3).
    Depol,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub channel: ChannelKind,
    pub probability: f64,
}

/// Channels attached to gate names, applied after each matching gate.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct NoiseModel {
    channels: BTreeMap<String, Vec<NoiseChannel>>,
}

impl NoiseModel {
    pub fn new() -> NoiseModel {
        NoiseModel::default()
    }

    pub fn add_quantum_error(
        &mut self,
        gate: &str,
        channel: &str,
        probability: f64,
    ) -> Result<(), SimulatorError> {
        let kind = match channel.to_ascii_lowercase().as_str() {
            "depol" => ChannelKind::Depol,
            _ => {
                return Err(SimulatorError::InvalidNoise(alloc::format!(
                    "unknown channel '{channel}'"
                )))
            }
        };
        self.push(
            gate,
            NoiseChannel {
                channel: kind,
                probability,
            },
        )
    }

    fn push(&mut self, gate: &str, ch: NoiseChannel) -> Result<(), SimulatorError> {
        if !(0.0..=1.0).contains(&ch.probability) {
            return Err(SimulatorError::InvalidNoise(alloc::format!(
                "probability {} for {gate} is outside [0, 1]",
                ch.probability
            )));
        }
        self.channels
            .entry(gate.to_uppercase())
            .or_default()
            .push(ch);
        Ok(())
    }

    pub fn channels(&self, gate: &str) -> &[NoiseChannel] {
        self.channels.get(gate).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn gates(&self) -> impl Iterator<Item = &str> {
        self.channels.keys().map(String::as_str)
    }
}

impl<'de> Deserialize<'de> for NoiseModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<NoiseModel, D::Error> {
        let raw = BTreeMap::<String, Vec<NoiseChannel>>::deserialize(d)?;
        let mut model = NoiseModel::new();
        for (gate, list) in raw {
            for ch in list {
                model.push(&gate, ch).map_err(serde::de::Error::custom)?;
            }
        }
        Ok(model)
    }
}

/// Draws the insertion for one gate: 0 means nothing, otherwise an index in
/// `1..4^k` whose base-4 digits (0 = I, 1 = X, 2 = Y, 3 = Z) give the Pauli on
/// each of the gate's qubits, controls first.
pub(crate) fn sample_insertions<R: RngCore + ?Sized>(
    gate: &Gate,
    channels: &[NoiseChannel],
    rng: &mut R,
    out: &mut Vec<u32>,
) {
    let k = gate.n_qubits() as u32;
    let n_words = 4u64.pow(k) - 1;
    for ch in channels {
        match ch.channel {
            ChannelKind::Depol => {
                if ch.probability > 0.0 && unit_f64(rng) < ch.probability {
                    let pick = 1 + ((unit_f64(rng) * n_words as f64) as u64).min(n_words - 1);
                    out.push(pick as u32);
                } else {
                    out.push(0);
                }
            }
        }
    }
}

/// Per-qubit Pauli codes of an insertion index, aligned with `gate.qubits()`.
pub(crate) fn insertion_paulis(gate: &Gate, pick: u32) -> impl Iterator<Item = (usize, u32)> + '_ {
    gate.qubits()
        .enumerate()
        .map(move |(m, q)| (q, (pick >> (2 * m)) & 3))
}

/// The gate followed by the stochastic Pauli gates drawn for one trajectory.
pub fn apply_noise_trajectory<R: RngCore + ?Sized>(
    gate: &Gate,
    noise: &NoiseModel,
    rng: &mut R,
) -> Vec<Gate> {
    let mut out = alloc::vec![gate.clone()];
    let mut picks = Vec::new();
    sample_insertions(gate, noise.channels(gate.name()), rng, &mut picks);
    for pick in picks.into_iter().filter(|&p| p != 0) {
        for (q, code) in insertion_paulis(gate, pick) {
            let name = match code {
                1 => "X",
                2 => "Y",
                3 => "Z",
                _ => continue,
            };
            out.push(Gate::single(name, q));
        }
    }
    out
}
