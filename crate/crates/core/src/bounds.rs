//! Lower bounds on the deadline, schedule length, vehicle count and cost.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::metric::{Access, Location, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    /// Length of a minimum spanning tree on the root and item locations.
    pub mst: f64,
    /// Minimum achievable delay.
    pub delay_lb: f64,
    /// Lower bound on the travel length of any schedule, `mst / 2`.
    pub length_lb: f64,
    /// Fractional lower bound on the vehicle count of any feasible schedule.
    pub vehicles_lb: f64,
    /// `length_lb + sigma * max(1, ceil(vehicles_lb))`.
    pub cost_lb: f64,
}

/// Minimum spanning tree over the `n + 1` nodes of the instance (node 0 is the
/// root, node `i + 1` is item `i`). Returns its length and its edges.
///
/// Dense Prim in `O(n^2)` distance evaluations. Co-located nodes are joined by
/// zero-length edges; ties pick the lowest node index.
pub fn mst_length(instance: &Instance) -> (f64, Vec<(usize, usize)>) {
    match instance.metric() {
        Metric::Explicit(m) => {
            let pts: Vec<usize> = (0..=instance.n())
                .map(|v| match instance.node_loc(v) {
                    Location::Point(p) => *p,
                    Location::Coord(..) => unreachable!("explicit instances use point locations"),
                })
                .collect();
            let off = m.row_offsets();
            // condensed index of (u, v) for a fixed u, None when co-located
            let index_row = |u: usize| {
                let (pts, off) = (&pts, &off);
                let a = pts[u];
                let row = off[a];
                move |v: usize| {
                    let b = pts[v];
                    match a.cmp(&b) {
                        Ordering::Less => Some(row.wrapping_add(b)),
                        Ordering::Greater => Some(off[b].wrapping_add(a)),
                        Ordering::Equal => None,
                    }
                }
            };
            match m.storage() {
                Access::Values(d) => prim(pts.len(), |u| {
                    let index = index_row(u);
                    move |v| index(v).map_or(0.0, |k| d[k])
                }),
                Access::Palette(values, codes) => prim(pts.len(), |u| {
                    let index = index_row(u);
                    move |v| index(v).map_or(0.0, |k| values[codes[k] as usize])
                }),
            }
        }
        Metric::Euclidean2D => prim(instance.n() + 1, |u| move |v| instance.node_dist(u, v)),
    }
}

/// Dense Prim over nodes `0..nodes` rooted at 0. `row(u)` gives the
/// distances from `u`.
fn prim<R: Fn(usize) -> f64>(nodes: usize, row: impl Fn(usize) -> R) -> (f64, Vec<(usize, usize)>) {
    // unvisited nodes with their best known attachment
    let mut open: Vec<usize> = (1..nodes).collect();
    let mut key: Vec<f64> = open.iter().map(|&v| row(0)(v)).collect();
    let mut link = vec![0usize; open.len()];
    let mut edges = Vec::with_capacity(nodes.saturating_sub(1));
    let mut length = NeumaierSum::default();
    let closest = |open: &[usize], key: &[f64]| {
        (0..open.len())
            .min_by(|&a, &b| key[a].total_cmp(&key[b]).then(open[a].cmp(&open[b])))
            .unwrap_or(0)
    };
    let mut best = closest(&open, &key);
    while !open.is_empty() {
        let b = open.swap_remove(best);
        let k = key.swap_remove(best);
        let l = link.swap_remove(best);
        edges.push((l, b));
        length.add(k);
        // relax and pick the next closest node in one pass
        best = 0;
        let dist = row(b);
        for i in 0..open.len() {
            let d = dist(open[i]);
            if d < key[i] {
                key[i] = d;
                link[i] = b;
            }
            if key[i] < key[best] || (key[i] == key[best] && open[i] < open[best]) {
                best = i;
            }
        }
    }
    (length.total(), edges)
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Largest deadline lower bound obtainable from item subsets: for each `j`,
/// the `j` farthest items force some item at distance at least `d_(j)` (the
/// `j`-th largest root distance) to pay `delta` and `min(j, n - 1)` hand-overs.
pub fn delay_lower_bound(instance: &Instance) -> f64 {
    let n = instance.n();
    let mut dist: Vec<f64> = (0..n).map(|i| instance.root_dist(i)).collect();
    dist.sort_by(|a, b| b.total_cmp(a));
    dist.iter()
        .enumerate()
        .map(|(j, &d)| d + instance.delta() + (j + 1).min(n - 1) as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn cost_lower_bound(instance: &Instance) -> LowerBounds {
    let (mst, _) = mst_length(instance);
    let length_lb = mst / 2.0;
    let vehicles_lb = (length_lb + instance.n() as f64 * instance.delta()) / instance.deadline();
    let cost_lb = length_lb + instance.sigma() * vehicles_lb.ceil().max(1.0);
    LowerBounds {
        mst,
        delay_lb: delay_lower_bound(instance),
        length_lb,
        vehicles_lb,
        cost_lb,
    }
}
