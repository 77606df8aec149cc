//! Deterministic parallel Monte Carlo accumulation.
//!
//! Trials are split into fixed-size chunks. Each chunk runs a sequential
//! Welford update in trial order; chunk summaries are merged with Chan's
//! pairwise formula along a balanced binary tree over the chunk indices. The
//! tree shape depends only on the trial count, so the resulting bits do not
//! depend on how many workers execute it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Trials per leaf of the reduction tree.
pub const CHUNK: u64 = 2048;

/// Environment variable selecting the worker count.
pub const WORKERS_ENV: &str = "DECOHERE_WORKERS";

/// Independent random stream for one trial, keyed on `(seed, trial_index)`.
///
/// ChaCha is a counter-based generator: the key comes from `seed` and the
/// stream id is the trial index, so no generator state is shared between
/// trials.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Running first and second central moments of a vector of features.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Moments {
    pub fn new(width: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; width],
            m2: vec![0.0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return other.clone();
        }
        if other.count == 0 {
            return self.clone();
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let mut out = Moments::new(self.width());
        out.count = self.count + other.count;
        for k in 0..self.width() {
            let delta = other.mean[k] - self.mean[k];
            out.mean[k] = self.mean[k] + delta * (nb / n);
            out.m2[k] = self.m2[k] + other.m2[k] + delta * delta * (na * nb / n);
        }
        out
    }

    /// Unbiased sample variance of feature `k`.
    pub fn sample_variance(&self, k: usize) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2[k] / (self.count - 1) as f64).max(0.0)
    }

    /// Standard error of the mean of feature `k`.
    pub fn std_err(&self, k: usize) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.sample_variance(k) / self.count as f64).sqrt()
    }
}

/// Runs trials on a rayon pool of a chosen size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    workers: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self::from_env()
    }
}

impl Engine {
    pub fn new(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
        }
    }

    /// Reads `DECOHERE_WORKERS`, defaulting to the available parallelism.
    pub fn from_env() -> Self {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(default_workers);
        Self::new(workers)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `trial(index, out)` for every index in `0..trials` and
    /// returns the moments of the `width` features it writes.
    pub fn run<F>(&self, trials: u64, width: usize, trial: F) -> Moments
    where
        F: Fn(u64, &mut [f64]) + Sync,
    {
        if trials == 0 {
            return Moments::new(width);
        }
        let chunks = trials.div_ceil(CHUNK);
        let reduce = || reduce_range(0, chunks, trials, width, &trial);
        if self.workers == 1 {
            return reduce();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(reduce),
            Err(_) => reduce(),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn reduce_range<F>(lo: u64, hi: u64, trials: u64, width: usize, trial: &F) -> Moments
where
    F: Fn(u64, &mut [f64]) + Sync,
{
    if hi - lo == 1 {
        let start = lo * CHUNK;
        let end = (start + CHUNK).min(trials);
        let mut acc = Moments::new(width);
        let mut buf = vec![0.0; width];
        for t in start..end {
            trial(t, &mut buf);
            acc.push(&buf);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = rayon::join(
        || reduce_range(lo, mid, trials, width, trial),
        || reduce_range(mid, hi, trials, width, trial),
    );
    left.merge(&right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.013).collect();
        let mut m = Moments::new(1);
        for &x in &xs {
            m.push(&[x]);
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((m.mean[0] - mean).abs() < 1e-13);
        assert!((m.sample_variance(0) - var).abs() < 1e-13);
    }

    #[test]
    fn merge_matches_sequential() {
        let mut all = Moments::new(2);
        let mut a = Moments::new(2);
        let mut b = Moments::new(2);
        for i in 0..500 {
            let x = [i as f64 * 0.5, (i as f64).sin()];
            all.push(&x);
            if i < 137 {
                a.push(&x)
            } else {
                b.push(&x)
            }
        }
        let m = a.merge(&b);
        assert_eq!(m.count, all.count);
        for k in 0..2 {
            assert!((m.mean[k] - all.mean[k]).abs() < 1e-12);
            assert!((m.m2[k] - all.m2[k]).abs() < 1e-9 * all.m2[k].abs().max(1.0));
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let f = |t: u64, out: &mut [f64]| {
            let mut rng = trial_rng(99, t);
            out[0] = rng.random::<f64>();
            out[1] = out[0] * out[0];
        };
        let trials = 3 * CHUNK + 17;
        let one = Engine::new(1).run(trials, 2, f);
        for w in [2, 3, 8] {
            assert_eq!(Engine::new(w).run(trials, 2, f), one);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 3).random();
        let b: u64 = trial_rng(7, 3).random();
        let c: u64 = trial_rng(7, 4).random();
        let d: u64 = trial_rng(8, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
