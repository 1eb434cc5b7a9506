//! Seeded uniform sampling of the simplex of Bell-diagonal states, and the
//! detection shares of the two criteria.
//!
//! Draws are flat on the `(d^2 - 1)`-simplex: `d^2` unit-exponential variates
//! normalized by their sum. Samples are cut into chunks of [`CHUNK_SIZE`];
//! chunk `i` draws from its own generator seeded with [`chunk_seed`]`(seed, i)`,
//! so results do not depend on how chunks are scheduled across threads.

use std::time::Instant;

use rand::SeedableRng;
use rand_distr::{Distribution, Exp1};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{classify, Label};
use crate::error::{Error, Result};
use crate::phase_space::{all_cosets, Coset};
use crate::weyl::{CoefficientMatrix, PhaseIndex};

pub const CHUNK_SIZE: u64 = 4096;

/// Generator and split function, recorded in every report.
pub const PRNG_NAME: &str = "xoshiro256++ (rand_xoshiro 0.7) seeded per chunk by splitmix64(seed + (chunk+1)*0x9E3779B97F4A7C15)";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the generator for chunk `chunk`.
pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    splitmix64(seed.wrapping_add(chunk.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub d: usize,
    pub n_samples: u64,
    pub seed: u64,
    /// Coefficients on this coset are forced to zero.
    pub zero_coset: Option<Coset>,
}

impl SamplerConfig {
    pub fn new(d: usize, n_samples: u64, seed: u64) -> Self {
        Self {
            d,
            n_samples,
            seed,
            zero_coset: None,
        }
    }

    pub fn with_zero_coset(mut self, coset: Coset) -> Self {
        self.zero_coset = Some(coset);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::DimensionTooSmall(self.d));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
        }
        if let Some(coset) = &self.zero_coset {
            if coset.d() != self.d {
                return Err(Error::InvalidConfig(format!(
                    "zero coset lives in d = {}, not {}",
                    coset.d(),
                    self.d
                )));
            }
            if !all_cosets(self.d)?
                .iter()
                .any(|c| c.elements() == coset.elements())
            {
                return Err(Error::InvalidConfig(
                    "zero coset is not a coset of an order-d subgroup".into(),
                ));
            }
        }
        Ok(())
    }

    fn n_chunks(&self) -> u64 {
        self.n_samples.div_ceil(CHUNK_SIZE)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        CHUNK_SIZE.min(self.n_samples - chunk * CHUNK_SIZE)
    }

    /// Flat positions that are drawn (everything outside the zero coset).
    fn free_positions(&self) -> Vec<usize> {
        let d = self.d;
        (0..d * d)
            .filter(|&i| match &self.zero_coset {
                Some(coset) => !coset.contains(PhaseIndex::from_flat(i, d)),
                None => true,
            })
            .collect()
    }
}

struct ChunkSampler {
    d: usize,
    free: Vec<usize>,
    rng: Xoshiro256PlusPlus,
    scratch: Vec<f64>,
}

impl ChunkSampler {
    fn new(cfg: &SamplerConfig, chunk: u64) -> Self {
        let free = cfg.free_positions();
        Self {
            d: cfg.d,
            scratch: vec![0.0; free.len()],
            free,
            rng: Xoshiro256PlusPlus::seed_from_u64(chunk_seed(cfg.seed, chunk)),
        }
    }

    fn draw(&mut self) -> CoefficientMatrix {
        let mut total = 0.0;
        for v in self.scratch.iter_mut() {
            let x: f64 = Exp1.sample(&mut self.rng);
            *v = x;
            total += x;
        }
        let mut values = vec![0.0; self.d * self.d];
        for (&pos, &x) in self.free.iter().zip(&self.scratch) {
            values[pos] = x / total;
        }
        CoefficientMatrix::from_raw(self.d, values)
    }
}

/// The `n_samples` draws of `cfg`, in chunk order.
pub fn sample_uniform(cfg: &SamplerConfig) -> Result<impl Iterator<Item = CoefficientMatrix> + '_> {
    cfg.validate()?;
    Ok((0..cfg.n_chunks()).flat_map(move |chunk| {
        let mut sampler = ChunkSampler::new(cfg, chunk);
        (0..cfg.chunk_len(chunk)).map(move |_| sampler.draw())
    }))
}

/// Runs `visit` over every sample of each chunk in parallel and sums the results.
fn fold_chunks<T, F>(cfg: &SamplerConfig, visit: F) -> T
where
    T: Default + Send + std::ops::Add<Output = T>,
    F: Fn(&mut T, &CoefficientMatrix) + Sync,
{
    (0..cfg.n_chunks())
        .into_par_iter()
        .map(|chunk| {
            let mut sampler = ChunkSampler::new(cfg, chunk);
            let mut acc = T::default();
            for _ in 0..cfg.chunk_len(chunk) {
                visit(&mut acc, &sampler.draw());
            }
            acc
        })
        .reduce(T::default, |a, b| a + b)
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct ShareCounts {
    npt: u64,
    realignment: u64,
    ppt_entangled: u64,
    undetected: u64,
    disagreements: u64,
}

impl std::ops::Add for ShareCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            npt: self.npt + o.npt,
            realignment: self.realignment + o.realignment,
            ppt_entangled: self.ppt_entangled + o.ppt_entangled,
            undetected: self.undetected + o.undetected,
            disagreements: self.disagreements + o.disagreements,
        }
    }
}

/// Detection shares over uniformly sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareReport {
    pub d: usize,
    pub n_samples: u64,
    pub seed: u64,
    /// Points forced to zero, if sampling was restricted to a face of the simplex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_coset: Option<Vec<PhaseIndex>>,
    /// Fraction with a non-positive partial transpose.
    pub npt_share: f64,
    /// Fraction detected by the realignment criterion.
    pub realignment_share: f64,
    /// Fraction that is PPT and detected by realignment.
    pub ppt_and_realignment_share: f64,
    /// Fraction detected by neither criterion (for `d = 2`: the separable states).
    pub undetected_share: f64,
    pub n_npt: u64,
    pub n_realignment: u64,
    pub n_ppt_entangled: u64,
    pub n_undetected: u64,
    /// States where "NPT" and "realignment detected" differ.
    pub n_criteria_disagree: u64,
    pub wall_time: f64,
    pub prng: String,
}

impl ShareReport {
    pub const CSV_HEADER: &'static str =
        "d,n,seed,npt_share,realignment_share,ppt_ent_share,undetected_share";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.d,
            self.n_samples,
            self.seed,
            self.npt_share,
            self.realignment_share,
            self.ppt_and_realignment_share,
            self.undetected_share
        )
    }

    /// Share of the PPT states that realignment still detects.
    pub fn realignment_share_of_ppt(&self) -> f64 {
        let ppt = self.n_samples - self.n_npt;
        if ppt == 0 {
            0.0
        } else {
            self.n_ppt_entangled as f64 / ppt as f64
        }
    }
}

/// Classifies every sample of `cfg` and aggregates the shares.
pub fn estimate_shares(cfg: &SamplerConfig) -> Result<ShareReport> {
    cfg.validate()?;
    let start = Instant::now();
    let counts: ShareCounts = fold_chunks(cfg, |acc: &mut ShareCounts, c| {
        let record = classify(c);
        match record.label {
            Label::NptEntangled => acc.npt += 1,
            Label::PptEntangledDetected => acc.ppt_entangled += 1,
            Label::Undetected | Label::Separable => acc.undetected += 1,
        }
        if record.realignment_detected {
            acc.realignment += 1;
        }
        if record.realignment_detected == record.is_ppt {
            acc.disagreements += 1;
        }
    });
    let n = cfg.n_samples as f64;
    Ok(ShareReport {
        d: cfg.d,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        zero_coset: cfg
            .zero_coset
            .as_ref()
            .map(|coset| coset.elements().to_vec()),
        npt_share: counts.npt as f64 / n,
        realignment_share: counts.realignment as f64 / n,
        ppt_and_realignment_share: counts.ppt_entangled as f64 / n,
        undetected_share: counts.undetected as f64 / n,
        n_npt: counts.npt,
        n_realignment: counts.realignment,
        n_ppt_entangled: counts.ppt_entangled,
        n_undetected: counts.undetected,
        n_criteria_disagree: counts.disagreements,
        wall_time: start.elapsed().as_secs_f64(),
        prng: PRNG_NAME.to_string(),
    })
}

/// Outcome counts for states with one coset of coefficients set to zero.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposition1Counts {
    pub n_ppt_entangled_detected: u64,
    pub n_npt: u64,
    pub n_other: u64,
}

impl std::ops::Add for Proposition1Counts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            n_ppt_entangled_detected: self.n_ppt_entangled_detected + o.n_ppt_entangled_detected,
            n_npt: self.n_npt + o.n_npt,
            n_other: self.n_other + o.n_other,
        }
    }
}

/// Samples qutrit states vanishing on `cfg.zero_coset` and classifies them.
/// No such state should be PPT-entangled.
pub fn proposition1_check(cfg: &SamplerConfig) -> Result<Proposition1Counts> {
    cfg.validate()?;
    if cfg.d != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: cfg.d,
        });
    }
    if cfg.zero_coset.is_none() {
        return Err(Error::InvalidConfig("a zero coset is required".into()));
    }
    Ok(fold_chunks(
        cfg,
        |acc: &mut Proposition1Counts, c| match classify(c).label {
            Label::PptEntangledDetected => acc.n_ppt_entangled_detected += 1,
            Label::NptEntangled => acc.n_npt += 1,
            _ => acc.n_other += 1,
        },
    ))
}
