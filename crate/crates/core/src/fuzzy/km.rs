//! Karnik–Mendel centroid type reduction over a sampled output FOU.

use crate::error::{Error, Result};

use super::set::{FiringInterval, It2Set, Universe};

/// Prefix sums of `w` and `y * w`, with a leading zero.
struct Prefix {
    w: Vec<f64>,
    yw: Vec<f64>,
}

impl Prefix {
    fn new(y: &[f64], w: &[f64]) -> Self {
        let mut pw = Vec::with_capacity(y.len() + 1);
        let mut pyw = Vec::with_capacity(y.len() + 1);
        let (mut s, mut sy) = (0.0, 0.0);
        pw.push(0.0);
        pyw.push(0.0);
        for (yi, wi) in y.iter().zip(w) {
            s += wi;
            sy += yi * wi;
            pw.push(s);
            pyw.push(sy);
        }
        Prefix { w: pw, yw: pyw }
    }

    fn total(&self) -> (f64, f64) {
        (*self.w.last().unwrap(), *self.yw.last().unwrap())
    }
}

/// Centroid when the first `k` samples take weights from `head` and the rest
/// from `tail`. `None` if the weights sum to zero.
fn split_centroid(head: &Prefix, tail: &Prefix, k: usize) -> Option<f64> {
    let (tw, tyw) = tail.total();
    let den = head.w[k] + (tw - tail.w[k]);
    if den <= 0.0 {
        return None;
    }
    Some((head.yw[k] + (tyw - tail.yw[k])) / den)
}

/// Iterates the KM switch point until it stops moving.
fn km_endpoint(y: &[f64], head: &Prefix, tail: &Prefix, start: f64, minimise: bool) -> f64 {
    let n = y.len();
    let mut c = start;
    let mut switch = usize::MAX;
    for _ in 0..=n + 1 {
        let k = y.partition_point(|&v| v <= c);
        if k == switch {
            return c;
        }
        switch = k;
        match split_centroid(head, tail, k) {
            Some(next) => c = next,
            None => break,
        }
    }
    // Not expected for sorted samples; scan every switch point instead.
    let scan = (0..=n).filter_map(|k| split_centroid(head, tail, k));
    if minimise {
        scan.fold(f64::INFINITY, f64::min)
    } else {
        scan.fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Centroid bounds `[yl, yr]` of a sampled interval type-2 set.
///
/// `y` must be sorted ascending and `lower[i] <= upper[i]` at every sample.
pub fn km_reduce(y: &[f64], lower: &[f64], upper: &[f64]) -> Result<(f64, f64)> {
    debug_assert_eq!(y.len(), lower.len());
    debug_assert_eq!(y.len(), upper.len());
    if upper.iter().all(|&u| u <= 0.0) {
        return Err(Error::NoRuleFired);
    }
    let pl = Prefix::new(y, lower);
    let pu = Prefix::new(y, upper);
    let (lw, lyw) = pl.total();
    let (uw, uyw) = pu.total();
    let mid = (lyw + uyw) / (lw + uw);

    // Left endpoint: upper weights left of the switch, lower weights right.
    let yl = km_endpoint(y, &pu, &pl, mid, true);
    // Right endpoint: lower weights left of the switch, upper weights right.
    let yr = km_endpoint(y, &pl, &pu, mid, false);
    // Prefix sums can round a centroid a few ulps past the grid ends.
    let (lo, hi) = (y[0], y[y.len() - 1]);
    Ok((yl.min(yr).clamp(lo, hi), yr.max(yl).clamp(lo, hi)))
}

/// Aggregates the fired consequents (max of clipped memberships) on a
/// `resolution`-point grid of `universe` and reduces the result.
pub fn km_type_reduce(
    fired: &[(&It2Set, FiringInterval)],
    universe: Universe,
    resolution: usize,
) -> Result<(f64, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidSet(format!(
            "type reduction resolution {resolution} must be at least 2"
        )));
    }
    let y = universe.grid(resolution);
    let mut lower = vec![0.0; resolution];
    let mut upper = vec![0.0; resolution];
    for (set, f) in fired {
        for (i, &yi) in y.iter().enumerate() {
            lower[i] = f64::max(lower[i], f.lo().min(set.lower(yi)));
            upper[i] = f64::max(upper[i], f.hi().min(set.upper(yi)));
        }
    }
    km_reduce(&y, &lower, &upper)
}

/// Crisp output: the midpoint of the type-reduced interval.
pub fn defuzzify(yl: f64, yr: f64) -> f64 {
    0.5 * (yl + yr)
}
