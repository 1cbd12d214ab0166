//! Reference implementations the library is checked against. They share no
//! code with the crate beyond reading parameters through its public API.
#![allow(dead_code)]

use hitroute_core::fuzzy::FuzzyLogicUnit;
use hitroute_core::network::{RoadNetwork, RouteWeight};

/// Trapezoid `(a, b, c, d)` of height `h`, evaluated from scratch.
pub fn trap(x: f64, [a, b, c, d]: [f64; 4], h: f64) -> f64 {
    if x < a || x > d {
        0.0
    } else if (b..=c).contains(&x) {
        h
    } else if x < b {
        h * (x - a) / (b - a)
    } else {
        h * (d - x) / (d - c)
    }
}

/// `n` samples of `[lo, hi]`, both ends included.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    g[n - 1] = hi;
    g
}

/// Centroid bounds by trying every switch point.
pub fn enumerate_switch_points(y: &[f64], lower: &[f64], upper: &[f64]) -> (f64, f64) {
    let n = y.len();
    let (mut yl, mut yr) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=n {
        let (mut nl, mut dl, mut nr, mut dr) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let (wl, wr) = if i < k {
                (upper[i], lower[i])
            } else {
                (lower[i], upper[i])
            };
            nl += y[i] * wl;
            dl += wl;
            nr += y[i] * wr;
            dr += wr;
        }
        if dl > 0.0 {
            yl = yl.min(nl / dl);
        }
        if dr > 0.0 {
            yr = yr.max(nr / dr);
        }
    }
    (yl, yr)
}

/// Type-1 Mamdani controller (min firing, max aggregation, sampled centroid)
/// using only the upper membership functions of `unit`.
pub fn type1_mamdani(unit: &FuzzyLogicUnit, x1: f64, x2: f64) -> Option<f64> {
    let [v1, v2] = unit.inputs();
    let out = unit.output();
    let mu1: Vec<f64> = v1.sets().iter().map(|s| trap(x1, s.umf().breakpoints(), 1.0)).collect();
    let mu2: Vec<f64> = v2.sets().iter().map(|s| trap(x2, s.umf().breakpoints(), 1.0)).collect();
    let mut strength = vec![0.0f64; out.sets().len()];
    for (i, a) in mu1.iter().enumerate() {
        for (j, b) in mu2.iter().enumerate() {
            let k = unit.consequent(i, j);
            strength[k] = strength[k].max(a.min(*b));
        }
    }
    let u = out.universe();
    let (mut num, mut den) = (0.0, 0.0);
    for y in grid(u.lo, u.hi, unit.resolution()) {
        let mu = out
            .sets()
            .iter()
            .zip(&strength)
            .map(|(s, &w)| trap(y, s.umf().breakpoints(), 1.0).min(w))
            .fold(0.0, f64::max);
        num += y * mu;
        den += mu;
    }
    (den > 0.0).then(|| num / den)
}

/// Cheapest cost over every simple edge path from `origin` to `dest`,
/// excluding the origin edge itself.
pub fn cheapest_simple_path(net: &RoadNetwork, origin: usize, dest: usize, w: RouteWeight) -> Option<f64> {
    fn walk(
        net: &RoadNetwork,
        e: usize,
        dest: usize,
        w: RouteWeight,
        cost: f64,
        seen: &mut [bool],
        best: &mut Option<f64>,
    ) {
        if e == dest {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for &s in net.successors(e) {
            if !seen[s] {
                seen[s] = true;
                walk(net, s, dest, w, cost + net.weight(s, w), seen, best);
                seen[s] = false;
            }
        }
    }
    let mut seen = vec![false; net.edge_count()];
    seen[origin] = true;
    let mut best = None;
    walk(net, origin, dest, w, 0.0, &mut seen, &mut best);
    best
}
