//! Rayon-backed beam evaluation.

use prehom_core::search::{BatchEvaluator, IntMatrix, ObjectiveData};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Environment variable with the number of worker threads for the beam.
pub const THREADS_ENV: &str = "PREHOM_THREADS";

/// Evaluates candidates on a rayon pool. Results come back in input order,
/// so selection is identical to [`prehom_core::search::SerialEvaluator`].
pub struct RayonEvaluator {
    pool: ThreadPool,
}

impl RayonEvaluator {
    /// `threads = 0` lets rayon choose.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonEvaluator { pool })
    }

    /// Thread count from `PREHOM_THREADS`, falling back to rayon's default.
    pub fn from_env() -> Result<Self, rayon::ThreadPoolBuildError> {
        let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0);
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BatchEvaluator for RayonEvaluator {
    fn evaluate(&self, data: &ObjectiveData, batch: &[IntMatrix]) -> Vec<f64> {
        self.pool.install(|| batch.par_iter().map(|h| data.eval(h)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use prehom_core::perturb::PartialTarget;
    use prehom_core::search::{approximate, approximate_with, SearchConfig};
    use prehom_core::AlternatingForm;

    #[test]
    fn matches_serial() {
        let x = AlternatingForm::<f64>::from_terms(4, 2, [(vec![1, 3], 1.0), (vec![2, 4], 2f64.sqrt())]).unwrap();
        let y = PartialTarget::from_values(x.shape().unwrap(), &[0.3, -0.7, 0.9]).unwrap();
        let cfg = SearchConfig::new(16, 4, 7, 1e-9).unwrap();
        let serial = approximate(&x, &y, &cfg).unwrap();
        let par = approximate_with(&x, &y, &cfg, &RayonEvaluator::new(4).unwrap()).unwrap();
        assert_eq!(serial, par);
        assert_eq!(serial.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), par.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
