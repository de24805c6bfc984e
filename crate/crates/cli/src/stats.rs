//! Success-rate summaries of learning curves.

/// Rolling success rate; early windows shrink to the history available.
pub fn rolling(success: &[bool], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(success.len());
    let mut hits = 0usize;
    for (i, &s) in success.iter().enumerate() {
        hits += s as usize;
        if i >= window {
            hits -= success[i - window] as usize;
        }
        out.push(hits as f64 / (i + 1).min(window) as f64);
    }
    out
}

/// The first episode count `e` whose last `window` episodes succeed at rate at
/// least `threshold`. Only full windows count.
pub fn episodes_to_threshold(success: &[bool], window: usize, threshold: f64) -> Option<usize> {
    if window == 0 || success.len() < window {
        return None;
    }
    let r = rolling(success, window);
    (window..=success.len()).find(|&e| r[e - 1] >= threshold)
}

/// Success rate over the last `window` episodes.
pub fn final_success(success: &[bool], window: usize) -> f64 {
    rolling(success, window).last().copied().unwrap_or(0.0)
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// First index at which `xs` reaches `level`.
pub fn first_at_least(xs: &[f64], level: f64) -> Option<usize> {
    xs.iter().position(|&x| x >= level)
}

/// Length of the longest run of consecutive entries at or above `level`.
pub fn longest_run_at_least(xs: &[f64], level: f64) -> usize {
    let (mut best, mut cur) = (0, 0);
    for &x in xs {
        cur = if x >= level { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}
