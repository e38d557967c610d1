//! Zones as explicit sets of integer valuations.
//!
//! Each operation is restated as a membership predicate over integer points
//! and evaluated on the box `0..=limit` per clock. For zones with closed
//! integer constraints the integer points determine the zone, so comparing
//! point sets compares zones.

use std::collections::BTreeSet;

use jitterbound::{Bound, Ticks, Zone};

pub type Point = Vec<Ticks>;

pub fn within(b: Bound, diff: Ticks) -> bool {
    match b.value() {
        None => true,
        Some(v) if b.is_strict() => diff < v,
        Some(v) => diff <= v,
    }
}

/// Whether `v` (without the zero clock) satisfies every entry of `zone`.
pub fn contains(zone: &Zone, v: &[Ticks]) -> bool {
    let n = zone.dim();
    let val = |i: usize| if i == 0 { 0 } else { v[i - 1] };
    (0..n).all(|i| (0..n).all(|j| i == j || within(zone.get(i, j), val(i) - val(j))))
}

/// Every point of `0..=limit` in each of `clocks` coordinates.
pub fn grid(clocks: usize, limit: Ticks) -> Vec<Point> {
    let mut points = vec![vec![]];
    for _ in 0..clocks {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..=limit).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    points
}

fn collect(clocks: usize, limit: Ticks, keep: impl Fn(&Point) -> bool) -> BTreeSet<Point> {
    grid(clocks, limit).into_iter().filter(|p| keep(p)).collect()
}

/// Integer points of `zone`.
pub fn points(zone: &Zone, limit: Ticks) -> BTreeSet<Point> {
    collect(zone.dim() - 1, limit, |p| contains(zone, p))
}

/// Points reachable from a point of `zone` by an integer delay.
pub fn up(zone: &Zone, limit: Ticks) -> BTreeSet<Point> {
    collect(zone.dim() - 1, limit, |p| {
        let most = p.iter().copied().min().unwrap_or(0);
        (0..=most).any(|t| {
            let q: Point = p.iter().map(|x| x - t).collect();
            contains(zone, &q)
        })
    })
}

/// Points of `zone` satisfying `x_i - x_j` within `b`.
pub fn constrain(zone: &Zone, i: usize, j: usize, b: Bound, limit: Ticks) -> BTreeSet<Point> {
    let val = |p: &Point, k: usize| if k == 0 { 0 } else { p[k - 1] };
    collect(zone.dim() - 1, limit, |p| {
        contains(zone, p) && within(b, val(p, i) - val(p, j))
    })
}

/// Images of points of `zone` under resetting `reset` (1-based clocks),
/// searching preimage coordinates in `0..=source`.
pub fn reset(zone: &Zone, clocks: &[usize], limit: Ticks, source: Ticks) -> BTreeSet<Point> {
    collect(zone.dim() - 1, limit, |p| {
        if clocks.iter().any(|&x| p[x - 1] != 0) {
            return false;
        }
        grid(clocks.len(), source).into_iter().any(|pre| {
            let mut q = p.clone();
            for (&x, v) in clocks.iter().zip(pre) {
                q[x - 1] = v;
            }
            contains(zone, &q)
        })
    })
}

/// Whether `zone` has an integer point in the box.
pub fn inhabited(zone: &Zone, limit: Ticks) -> bool {
    grid(zone.dim() - 1, limit).iter().any(|p| contains(zone, p))
}
