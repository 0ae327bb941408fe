use std::time::Duration;

/// Median of the samples (mean of the two middle values for even counts).
pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[mid] } else { 0.5 * (s[mid - 1] + s[mid]) })
}

/// One warm-up call, then `reps` timed calls; returns the median seconds.
/// `run` reports its own elapsed time so setup can stay outside the clock.
pub fn median_seconds<E>(reps: usize, mut run: impl FnMut() -> Result<Duration, E>) -> Result<f64, E> {
    run()?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        samples.push(run()?.as_secs_f64());
    }
    Ok(median(&samples).expect("reps >= 1"))
}
