//! Deterministic builders for the worked examples and seeded random corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Item};
use crate::metric::{shortest_path_closure, ExplicitMetric, Location, Metric};
use crate::schedule::Schedule;
use crate::transforms::min_delay;

/// How a generator picks the deadline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeadlinePolicy {
    /// `min_delay * slack`; feasible iff `slack >= 1`.
    Slack(f64),
    Fixed(f64),
}

impl Default for DeadlinePolicy {
    fn default() -> Self {
        DeadlinePolicy::Slack(1.0)
    }
}

impl DeadlinePolicy {
    fn apply(self, instance: Instance) -> Result<Instance> {
        let deadline = match self {
            DeadlinePolicy::Slack(s) if s.is_finite() && s > 0.0 => min_delay(&instance) * s,
            DeadlinePolicy::Slack(s) => return Err(Error::InvalidParams(format!("slack must be positive, got {s}"))),
            DeadlinePolicy::Fixed(d) => d,
        };
        instance.into_deadline(deadline)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_box")]
    pub box_size: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub deadline: DeadlinePolicy,
}

fn default_box() -> f64 {
    100.0
}

fn default_delta() -> f64 {
    1.0
}

impl RandomParams {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            box_size: default_box(),
            delta: default_delta(),
            sigma: 0.0,
            deadline: DeadlinePolicy::default(),
        }
    }
}

/// Generator selection, as stored in benchmark corpus files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorParams {
    Figure1 {
        #[serde(default)]
        sigma: f64,
    },
    Tight {
        k: usize,
        epsilon: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        sigma: f64,
        #[serde(default)]
        deadline: DeadlinePolicy,
    },
    Steiner {
        n: usize,
        epsilon: f64,
    },
    RandomEuclidean(RandomParams),
    RandomExplicit {
        #[serde(flatten)]
        params: RandomParams,
        /// Non-item points available for hand-overs.
        #[serde(default)]
        extra_points: usize,
    },
}

impl GeneratorParams {
    pub fn generate(&self) -> Result<Instance> {
        match *self {
            GeneratorParams::Figure1 { sigma } => gen_figure1(sigma).map(|(i, _)| i),
            GeneratorParams::Tight {
                k,
                epsilon,
                delta,
                sigma,
                deadline,
            } => gen_tight(k, epsilon, delta, sigma, deadline),
            GeneratorParams::Steiner { n, epsilon } => gen_steiner(n, epsilon),
            GeneratorParams::RandomEuclidean(ref p) => gen_random_euclidean(p),
            GeneratorParams::RandomExplicit { ref params, extra_points } => gen_random_explicit(params, extra_points),
        }
    }
}

pub const FIGURE1_POINTS: [&str; 11] = ["r", "s1", "s2", "s3", "p1", "p2", "p3", "p4", "p5", "p6", "p7"];
pub const FIGURE1_EDGES: [(usize, usize, f64); 10] = [
    (0, 1, 8.0),
    (1, 2, 2.0),
    (2, 4, 1.0),
    (4, 5, 2.0),
    (5, 6, 1.0),
    (2, 10, 2.0),
    (1, 7, 1.0),
    (7, 3, 3.0),
    (3, 8, 2.0),
    (3, 9, 1.0),
];
pub const FIGURE1_DELTA: f64 = 4.0;
pub const FIGURE1_DEADLINE: f64 = 30.0;

/// The seven-item example schedule with four vehicles, on the shortest-path
/// metric of its drawing. The deadline equals the schedule's delay.
pub fn gen_figure1(sigma: f64) -> Result<(Instance, Schedule)> {
    let dist = shortest_path_closure(FIGURE1_POINTS.len(), &FIGURE1_EDGES)?;
    let names = FIGURE1_POINTS.iter().map(|s| s.to_string()).collect();
    let metric = Metric::Explicit(ExplicitMetric::new(names, &dist)?);
    let items = (1..=7).map(|i| Item::new(format!("p{i}"), Location::Point(i + 3))).collect();
    let instance = Instance::new(metric, Location::Point(0), items, FIGURE1_DELTA, sigma, FIGURE1_DEADLINE)?;

    let mut s = Schedule::new(Location::Point(0));
    let p = |i: usize| Location::Point(i + 3);
    let s1 = s.add_aux(Location::Point(1));
    let s2 = s.add_aux(Location::Point(2));
    let s3 = s.add_aux(Location::Point(3));
    let items: Vec<_> = (1..=7).map(|i| s.add_item(format!("p{i}"), p(i))).collect();
    let [p1, p2, p3, p4, p5, p6, p7] = items[..] else { unreachable!() };
    let root = s.root();
    s.add_arc(root, s1);
    s.add_arc(s1, s2);
    s.add_arc(s1, p4);
    s.add_arc(s2, p1);
    s.add_arc(s2, p7);
    s.add_arc(p1, p2);
    s.add_arc(p2, p3);
    s.add_arc(p4, s3);
    s.add_arc(s3, p5);
    s.add_arc(s3, p6);
    Ok((instance, s))
}

/// Point index of `p_ij` (1-based `i`, `j`) in a tight instance.
pub fn tight_point(k: usize, i: usize, j: usize) -> usize {
    2 + (i - 1) * k + (j - 1)
}

/// The family where every shallow spanning tree is far longer than the MST:
/// a root at distance 1 from everything, and a spider of `k` blue legs with
/// `k` vertices each around `s`, blue edges of length `eps / (k - 1)`.
///
/// Distances are the shortest-path closure, written in closed form: blue
/// distance along the spider, capped at 2 by the detour through the root.
pub fn gen_tight(k: usize, epsilon: f64, delta: f64, sigma: f64, deadline: DeadlinePolicy) -> Result<Instance> {
    // k > 1 + eps is only needed for the ratio argument; the graph and its
    // closed forms are fine for any k >= 2 as long as blue edges are not
    // longer than red ones
    if !(2..=10_000).contains(&k) || !(epsilon.is_finite() && epsilon > 0.0) || epsilon > (k - 1) as f64 {
        return Err(Error::InvalidParams(format!(
            "tight family needs 2 <= k <= 10000 and 0 < eps <= k - 1, got k = {k}, eps = {epsilon}"
        )));
    }
    let blue = epsilon / (k - 1) as f64;
    let mut names = vec!["r".to_string(), "s".to_string()];
    for i in 1..=k {
        for j in 1..=k {
            names.push(format!("p{i}_{j}"));
        }
    }
    // (leg, depth) of each spider vertex, s being leg 0 at depth 0
    let spider: Vec<(u32, u32)> = (0..names.len())
        .map(|v| if v < 2 { (0, 0) } else { (1 + ((v - 2) / k) as u32, 1 + ((v - 2) % k) as u32) })
        .collect();
    // distinct distances: hops * blue for up to 2k hops, capped at 2, then
    // the red edge length 1 last
    let mut values: Vec<f64> = (0..=2 * k).map(|h| (h as f64 * blue).min(2.0)).collect();
    let red = values.len() as u16;
    values.push(1.0);
    let size = names.len();
    let metric = ExplicitMetric::from_palette(names.clone(), values, |a, codes| {
        if a == 0 {
            codes.resize(codes.len() + size - 1, red);
            return;
        }
        let (ra, da) = spider[a];
        let depths = 1..=k as u16;
        if ra == 0 {
            // s reaches every depth straight down its leg
            for _ in 0..k {
                codes.extend(depths.clone());
            }
            return;
        }
        // rest of a's own leg, then later legs through s
        codes.extend(1..=(k as u32 - da) as u16);
        for _ in ra + 1..=k as u32 {
            codes.extend(depths.clone().map(|db| db + da as u16));
        }
    });
    let items = names[1..]
        .iter()
        .enumerate()
        .map(|(i, name)| Item::new(name.clone(), Location::Point(i + 1)))
        .collect();
    let instance = Instance::new(Metric::Explicit(metric), Location::Point(0), items, delta, sigma, 1.0)?;
    deadline.apply(instance)
}

/// MST length of the tight family, `1 + k^2 eps / (k - 1)`.
pub fn tight_mst(k: usize, epsilon: f64) -> f64 {
    1.0 + (k * k) as f64 * epsilon / (k - 1) as f64
}

/// `(eps n^2 + 2n) / (2 - eps)`, the distance from `s` to every item.
pub fn steiner_arm(n: usize, epsilon: f64) -> f64 {
    let n = n as f64;
    (epsilon * n * n + 2.0 * n) / (2.0 - epsilon)
}

/// The instance where hand-overs at a non-item point `s` save a factor of
/// about `2 / eps` in cost: `s` at distance `n^2` from the root, items at
/// distance `a` from `s` and `2a` from each other.
pub fn gen_steiner(n: usize, epsilon: f64) -> Result<Instance> {
    if n < 2 || !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParams(format!(
            "steiner family needs n >= 2 and 0 < eps < 1/2, got n = {n}, eps = {epsilon}"
        )));
    }
    let a = steiner_arm(n, epsilon);
    let hub = (n * n) as f64;
    let mut names = vec!["r".to_string(), "s".to_string()];
    names.extend((1..=n).map(|i| format!("p{i}")));
    let size = n + 2;
    let mut dist = vec![vec![0.0; size]; size];
    for (u, row) in dist.iter_mut().enumerate() {
        for (v, d) in row.iter_mut().enumerate() {
            *d = match (u.min(v), u.max(v)) {
                (x, y) if x == y => 0.0,
                (0, 1) => hub,
                (0, _) => hub + a,
                (1, _) => a,
                _ => 2.0 * a,
            };
        }
    }
    let metric = Metric::Explicit(ExplicitMetric::new(names, &dist)?);
    let items = (1..=n).map(|i| Item::new(format!("p{i}"), Location::Point(i + 1))).collect();
    let deadline = (2.0 * hub + 4.0 * n as f64 - epsilon * n as f64) / (2.0 - epsilon);
    Instance::new(metric, Location::Point(0), items, 1.0, 0.0, deadline)
}

fn check_random(p: &RandomParams) -> Result<()> {
    if p.n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    if !(p.box_size.is_finite() && p.box_size > 0.0) {
        return Err(Error::InvalidParams(format!("box size must be positive, got {}", p.box_size)));
    }
    Ok(())
}

fn sample_points(rng: &mut ChaCha8Rng, count: usize, side: f64) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect()
}

/// `n` items uniform in `[0, box)^2` with the root at the centre. The
/// random stream is ChaCha8 seeded with `seed`.
pub fn gen_random_euclidean(p: &RandomParams) -> Result<Instance> {
    check_random(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let items = sample_points(&mut rng, p.n, p.box_size)
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| Item::new(format!("p{}", i + 1), Location::Coord(x, y)))
        .collect();
    let centre = p.box_size / 2.0;
    let instance = Instance::new(
        Metric::Euclidean2D,
        Location::Coord(centre, centre),
        items,
        p.delta,
        p.sigma,
        1.0,
    )?;
    p.deadline.apply(instance)
}

/// Same sampling as the Euclidean generator, stored as an explicit matrix
/// with the root at point 0, items at points `1..=n` and `extra_points`
/// further uniform points usable for hand-overs.
pub fn gen_random_explicit(p: &RandomParams, extra_points: usize) -> Result<Instance> {
    check_random(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let centre = p.box_size / 2.0;
    let mut pts = vec![(centre, centre)];
    pts.extend(sample_points(&mut rng, p.n + extra_points, p.box_size));
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
        .collect();
    let mut names = vec!["r".to_string()];
    names.extend((1..=p.n).map(|i| format!("p{i}")));
    names.extend((1..=extra_points).map(|i| format!("x{i}")));
    let metric = Metric::Explicit(ExplicitMetric::new(names, &dist)?);
    let items = (1..=p.n).map(|i| Item::new(format!("p{i}"), Location::Point(i))).collect();
    let instance = Instance::new(metric, Location::Point(0), items, p.delta, p.sigma, 1.0)?;
    p.deadline.apply(instance)
}
