use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One independent random stream for a bootstrap. Streams sharing a root seed
/// but differing in `stream` never overlap.
#[derive(Debug, Clone)]
pub struct BootstrapStream {
    rng: ChaCha8Rng,
}

impl BootstrapStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }
}

/// Moving-block bootstrap standard error of `Σ num / Σ den`.
///
/// Each resample concatenates uniformly drawn blocks of `block_length`
/// consecutive indices, truncating the last one so every resample has the
/// original length.
pub fn block_bootstrap_ratio<T: Real>(
    num: &[T],
    den: &[T],
    block_length: usize,
    resamples: usize,
    stream: &mut BootstrapStream,
) -> Result<T> {
    let n = num.len();
    if den.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: den.len() });
    }
    let block_length = block_length.max(1);
    let needed = block_length.max(2);
    if n < needed {
        return Err(Error::TooFewSamples { needed, have: n });
    }
    if resamples < 2 {
        return Err(Error::Config("bootstrap needs at least 2 resamples".to_string()));
    }
    let starts = n - block_length + 1;
    let mut estimates = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let (mut a, mut b) = (T::zero(), T::zero());
        let mut filled = 0;
        while filled < n {
            let start = stream.rng.random_range(0..starts);
            let take = block_length.min(n - filled);
            for k in start..start + take {
                a = a + num[k];
                b = b + den[k];
            }
            filled += take;
        }
        estimates.push(a / b);
    }
    let r = T::from_usize_lossy(resamples);
    let mean = estimates.iter().copied().sum::<T>() / r;
    let var = estimates.iter().map(|&e| (e - mean) * (e - mean)).sum::<T>() / (r - T::one());
    Ok(var.sqrt())
}

/// Sample mean of `series` and its moving-block bootstrap standard error.
pub fn block_bootstrap_mean<T: Real>(
    series: &[T],
    block_length: usize,
    resamples: usize,
    stream: &mut BootstrapStream,
) -> Result<(T, T)> {
    let ones = vec![T::one(); series.len()];
    let stderr = block_bootstrap_ratio(series, &ones, block_length, resamples, stream)?;
    let mean = series.iter().copied().sum::<T>() / T::from_usize_lossy(series.len());
    Ok((mean, stderr))
}
