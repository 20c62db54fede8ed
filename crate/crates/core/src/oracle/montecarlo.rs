//! Sampling check of the measurement-statistics model behind the
//! mutual-information formulas.
//!
//! Outcomes are drawn from the Gaussian distribution implied by `(a, b, c)`
//! and the plug-in mutual information of the sample covariance is compared to
//! the analytic value. This exercises the covariance structure (variances,
//! sifting, sign of the `p` correlation); it cannot test Gaussianity, which
//! the plug-in estimator assumes.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::generic::gaussian_mutual_information;
use crate::channel::{reduced_ab, ChannelParams, ReducedAbParams};
use crate::error::{invalid, numerical, Result};
use crate::keyrate::{Measurement, ProtocolSpec};

pub const MIN_SAMPLES: usize = 10_000;
pub const BATCHES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Joint distribution of Alice's and Bob's raw (unnormalised) outcomes.
///
/// Homodyne outcomes have variance `a` (or `b`), heterodyne outcomes `a + 1`
/// (or `b + 1`). Each correlated quadrature pair has covariance `+c` for `x`
/// and `−c` for `p`. A heterodyne outcome contributes its `p` component only
/// when the partner heterodynes too.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    covariance: DMatrix<f64>,
    dim_alice: usize,
}

impl OutcomeModel {
    pub fn new(spec: &ProtocolSpec, r: &ReducedAbParams) -> Result<Self> {
        let ReducedAbParams { a, b, c } = *r;
        let alice_het = spec.alice_measurement() == Measurement::Heterodyne;
        let bob_het = spec.bob_measurement() == Measurement::Heterodyne;
        let va = if alice_het { a + 1.0 } else { a };
        let vb = if bob_het { b + 1.0 } else { b };
        let covariance = if alice_het && bob_het {
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    va, 0.0, c, 0.0, //
                    0.0, va, 0.0, -c, //
                    c, 0.0, vb, 0.0, //
                    0.0, -c, 0.0, vb,
                ],
            )
        } else {
            DMatrix::from_row_slice(2, 2, &[va, c, c, vb])
        };
        let dim_alice = covariance.nrows() / 2;
        Ok(Self { covariance, dim_alice })
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn dim_alice(&self) -> usize {
        self.dim_alice
    }

    pub fn exact_mutual_information(&self) -> Result<f64> {
        gaussian_mutual_information(&self.covariance, self.dim_alice)
    }

    fn cholesky(&self) -> Result<DMatrix<f64>> {
        self.covariance
            .clone()
            .cholesky()
            .map(|ch| ch.l())
            .ok_or_else(|| numerical("outcome covariance is not positive definite"))
    }

    /// `n` draws, one per row.
    pub fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<DMatrix<f64>> {
        let l = self.cholesky()?;
        let k = self.covariance.nrows();
        let mut out = DMatrix::zeros(n, k);
        let mut z = DVector::zeros(k);
        for i in 0..n {
            for zj in z.iter_mut() {
                *zj = StandardNormal.sample(rng);
            }
            out.row_mut(i).copy_from(&(&l * &z).transpose());
        }
        Ok(out)
    }
}

// Outcome vectors have at most four components.
const MAX_DIM: usize = 4;

/// Running first and second moments of a stream of outcome vectors.
#[derive(Debug, Clone)]
struct Moments {
    k: usize,
    n: usize,
    sum: [f64; MAX_DIM],
    cross: [[f64; MAX_DIM]; MAX_DIM],
}

impl Moments {
    fn new(k: usize) -> Self {
        Self {
            k,
            n: 0,
            sum: [0.0; MAX_DIM],
            cross: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        for i in 0..self.k {
            self.sum[i] += x[i];
            for j in 0..=i {
                self.cross[i][j] += x[i] * x[j];
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        for i in 0..self.k {
            self.sum[i] += other.sum[i];
            for j in 0..=i {
                self.cross[i][j] += other.cross[i][j];
            }
        }
    }

    /// Unbiased sample covariance.
    fn covariance(&self) -> DMatrix<f64> {
        let n = self.n as f64;
        DMatrix::from_fn(self.k, self.k, |i, j| {
            let (i, j) = if i >= j { (i, j) } else { (j, i) };
            (self.cross[i][j] - self.sum[i] * self.sum[j] / n) / (n - 1.0)
        })
    }
}

/// Plug-in Gaussian mutual information of sampled outcomes (rows), with the
/// first `dim_a` columns belonging to A.
pub fn plugin_mutual_information(samples: &DMatrix<f64>, dim_a: usize) -> Result<f64> {
    if samples.nrows() < 2 {
        return Err(invalid("need at least two samples"));
    }
    if samples.ncols() > MAX_DIM {
        return Err(invalid(format!("at most {MAX_DIM} outcome columns are supported")));
    }
    let mut m = Moments::new(samples.ncols());
    for row in samples.row_iter() {
        let x: Vec<f64> = row.iter().copied().collect();
        m.push(&x);
    }
    gaussian_mutual_information(&m.covariance(), dim_a)
}

/// Monte Carlo estimate of `I_AB` with a batch-means standard error.
///
/// Batch `j` draws from its own ChaCha stream `j` under `seed`, so the result
/// is independent of how batches are scheduled across threads.
pub fn monte_carlo_mi(spec: &ProtocolSpec, params: &ChannelParams, n_samples: usize, seed: u64) -> Result<McEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(invalid(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let model = OutcomeModel::new(spec, &reduced_ab(params)?)?;
    let l = model.cholesky()?;
    let k = model.covariance.nrows();

    let batch_moments: Vec<Moments> = (0..BATCHES)
        .into_par_iter()
        .map(|batch| {
            let size = n_samples / BATCHES + usize::from(batch < n_samples % BATCHES);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64);
            let mut m = Moments::new(k);
            let (mut z, mut x) = ([0.0; MAX_DIM], [0.0; MAX_DIM]);
            for _ in 0..size {
                for zj in z[..k].iter_mut() {
                    *zj = StandardNormal.sample(&mut rng);
                }
                for i in 0..k {
                    x[i] = (0..=i).map(|j| l[(i, j)] * z[j]).sum();
                }
                m.push(&x);
            }
            m
        })
        .collect();

    let batch_mi = batch_moments
        .iter()
        .map(|m| gaussian_mutual_information(&m.covariance(), model.dim_alice))
        .collect::<Result<Vec<f64>>>()?;
    let mut pooled = Moments::new(k);
    for m in &batch_moments {
        pooled.merge(m);
    }
    let estimate = gaussian_mutual_information(&pooled.covariance(), model.dim_alice)?;

    let nb = BATCHES as f64;
    let mean = batch_mi.iter().sum::<f64>() / nb;
    let var = batch_mi.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nb - 1.0);
    let std_error = (var / nb).sqrt();
    if !(std_error > 0.0) {
        return Err(numerical("batch means have zero spread"));
    }
    Ok(McEstimate {
        estimate,
        std_error,
        n_samples,
        seed,
    })
}
