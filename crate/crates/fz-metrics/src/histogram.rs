use crate::error::{MetricsError, Result};

/// Counts scores into `bins` equal-width bins over [0, 1]. A score of
/// exactly 1.0 lands in the last bin.
pub fn prob_histogram(scores: &[f64], bins: usize) -> Result<Vec<u64>> {
    if bins < 1 {
        return Err(MetricsError::InvalidBins);
    }
    let mut counts = vec![0u64; bins];
    for &s in scores {
        if !(0.0..=1.0).contains(&s) {
            return Err(MetricsError::ScoreOutOfRange(s));
        }
        let idx = ((s * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}
