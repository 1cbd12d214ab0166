use super::TripRecord;

/// Mean duration of trips arrived by each step `1..=horizon`
/// (`None` before the first arrival).
pub fn running_averages(records: &[TripRecord], horizon: u64) -> Vec<Option<f64>> {
    let mut done: Vec<(u64, u64)> = records.iter().filter_map(|r| Some((r.arrival?, r.duration?))).collect();
    done.sort_unstable();
    let mut out = Vec::with_capacity(horizon as usize);
    let (mut k, mut n, mut sum) = (0, 0u64, 0u64);
    for step in 1..=horizon {
        while k < done.len() && done[k].0 <= step {
            sum += done[k].1;
            n += 1;
            k += 1;
        }
        out.push((n > 0).then(|| sum as f64 / n as f64));
    }
    out
}

/// Mean over steps of the running average trip duration, skipping steps
/// before the first arrival; `None` when nothing arrived.
pub fn mean_average_travel_time(records: &[TripRecord], horizon: u64) -> Option<f64> {
    let defined: Vec<f64> = running_averages(records, horizon).into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}
