//! Histogram resampling and the bootstrap energy pipeline.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::mcweeny::mcweeny_purify_2rdm;
use super::rdm::{energy_from_rdms, rdm_words, rdms_from_expectations};
use super::PostprocessError;
use crate::mapping::MappingConfig;
use crate::measurement::expectations_from_histograms;
use crate::operator::{FermionOperator, PauliWord};
use crate::rng::{self, unit_f64};
use crate::simulator::Histogram;

/// Draws `n_shots` outcomes from `freqs` and returns their empirical
/// frequencies. Keys are visited in sorted order when inverting the CDF.
pub fn resample_frequencies<R: RngCore + ?Sized>(
    freqs: &Histogram,
    n_shots: u64,
    rng: &mut R,
) -> Histogram {
    let keys: Vec<(&String, f64)> = freqs
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k, p))
        .collect();
    let total: f64 = keys.iter().map(|(_, p)| p).sum();
    let mut cdf = Vec::with_capacity(keys.len());
    let mut acc = 0.0;
    for (_, p) in &keys {
        acc += p / total;
        cdf.push(acc);
    }
    let mut counts = alloc::vec![0u64; keys.len()];
    for _ in 0..n_shots {
        let u = unit_f64(rng);
        let i = cdf.partition_point(|&c| c <= u).min(keys.len() - 1);
        counts[i] += 1;
    }
    let mut out = BTreeMap::new();
    for ((k, _), c) in keys.iter().zip(counts) {
        if c > 0 {
            out.insert((*k).clone(), c as f64 / n_shots as f64);
        }
    }
    Histogram(out)
}

/// Mean and sample standard deviation (denominator N − 1).
pub fn series_stats(series: &[f64]) -> Result<(f64, f64), PostprocessError> {
    if series.len() < 2 {
        return Err(PostprocessError::TooFewSamples(series.len()));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let ss: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok((mean, libm::sqrt(ss / (n - 1.0))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub n_resamples: usize,
    pub seed: u64,
    /// McWeeny convergence threshold; no purification when absent.
    pub purify: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub mean: f64,
    pub stdev: f64,
    pub n_resamples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub series: Vec<f64>,
}

/// Energy of `h` from one set of measured histograms: expectations, RDMs,
/// optional purification.
pub fn energy_from_histograms(
    h: &FermionOperator,
    mapping: &MappingConfig,
    histograms: &BTreeMap<PauliWord, Histogram>,
    purify: Option<f64>,
) -> Result<f64, PostprocessError> {
    let words = rdm_words(mapping)?;
    let ex = expectations_from_histograms(words.iter(), histograms, None)?;
    let mut rdm = rdms_from_expectations(mapping, &ex)?;
    if let Some(conv) = purify {
        rdm = mcweeny_purify_2rdm(&rdm, conv)?.value;
    }
    energy_from_rdms(h, &rdm)
}

/// Resamples every basis histogram (`n_shots` each, stream `(seed, "bootstrap", i)`
/// for resample `i`, bases in key order) and evaluates the energy pipeline.
pub fn bootstrap_energy(
    h: &FermionOperator,
    mapping: &MappingConfig,
    histograms: &BTreeMap<PauliWord, Histogram>,
    n_shots: u64,
    opts: &BootstrapOptions,
) -> Result<BootstrapReport, PostprocessError> {
    if n_shots == 0 {
        return Err(PostprocessError::Invalid("n_shots must be positive".into()));
    }
    let words = rdm_words(mapping)?;
    let mut series = Vec::with_capacity(opts.n_resamples);
    for i in 0..opts.n_resamples {
        let mut r = rng::stream(opts.seed, "bootstrap", i as u64);
        let resampled: BTreeMap<PauliWord, Histogram> = histograms
            .iter()
            .map(|(b, hist)| (b.clone(), resample_frequencies(hist, n_shots, &mut r)))
            .collect();
        let ex = expectations_from_histograms(words.iter(), &resampled, None)?;
        let mut rdm = rdms_from_expectations(mapping, &ex)?;
        if let Some(conv) = opts.purify {
            rdm = mcweeny_purify_2rdm(&rdm, conv)?.value;
        }
        series.push(energy_from_rdms(h, &rdm)?);
    }
    let (mean, stdev) = series_stats(&series)?;
    Ok(BootstrapReport {
        mean,
        stdev,
        n_resamples: opts.n_resamples,
        seed: opts.seed,
        series,
    })
}
