/// Default level above which a measure counts as born.
pub const BIRTH_THRESHOLD: f64 = 1e-12;
/// Bracket width at which refinement stops.
pub const REFINE_TOL: f64 = 1e-10;

/// Index of the first sample above `threshold` whose predecessor is at or
/// below it.
pub fn first_crossing(series: &[(f64, f64)], threshold: f64) -> Option<usize> {
    series
        .windows(2)
        .position(|w| w[0].1 <= threshold && w[1].1 > threshold)
        .map(|i| i + 1)
}

/// First time the series rises above `threshold`, or `None` without a
/// crossing. With `refine` the bracketing grid interval is bisected on that
/// function down to [`REFINE_TOL`]; otherwise the grid time is returned.
pub fn detect_birth_time(
    series: &[(f64, f64)],
    threshold: f64,
    refine: Option<&dyn Fn(f64) -> f64>,
) -> Option<f64> {
    let i = first_crossing(series, threshold)?;
    let (mut lo, mut hi) = (series[i - 1].0, series[i].0);
    let Some(f) = refine else {
        return Some(hi);
    };
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
