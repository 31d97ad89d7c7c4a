//! Tour splitting: groups items along a short Hamiltonian path from the root
//! to the farthest item, cutting wherever a group would get too long or too
//! populous.

use crate::bounds::mst_length;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// A maximal piece of the split path.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Item indices in path order.
    pub items: Vec<usize>,
    /// Largest root distance of an item in the group.
    pub remoteness: f64,
    /// Length of the path through the group's items.
    pub path_length: f64,
}

/// Ordered partition of the items into path-connected groups, sorted by
/// non-decreasing remoteness.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub groups: Vec<Group>,
    pub epsilon: f64,
    /// Item index of the farthest item, the end of the Hamiltonian path.
    pub farthest: usize,
    /// Length of the Hamiltonian root-to-farthest path before splitting.
    pub tour_length: f64,
    /// Minimum spanning tree length used to build the path.
    pub mst: f64,
}

impl Grouping {
    /// Total length of all group paths, `c(F)`.
    pub fn forest_length(&self) -> f64 {
        self.groups.iter().map(|g| g.path_length).sum()
    }

    /// Item ids of each group, in group order.
    pub fn item_ids<'a>(&self, instance: &'a Instance) -> Vec<Vec<&'a str>> {
        self.groups
            .iter()
            .map(|g| g.items.iter().map(|&i| instance.items()[i].id.as_str()).collect())
            .collect()
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Item at maximum root distance, ties broken by smallest id.
pub fn farthest_item(instance: &Instance) -> usize {
    (0..instance.n())
        .min_by(|&a, &b| {
            instance
                .root_dist(b)
                .total_cmp(&instance.root_dist(a))
                .then_with(|| instance.items()[a].id.cmp(&instance.items()[b].id))
        })
        .expect("instances have at least one item")
}

/// Visits all nodes of the spanning tree from the root, ending at `target`:
/// the preorder of a depth-first search that enters the branch towards
/// `target` last at every vertex of the root-`target` path, with `target`
/// itself emitted after its own subtrees. This is the shortcut of an Euler
/// walk that doubles every tree edge off the root-`target` path.
pub fn hamiltonian_path(nodes: usize, edges: &[(usize, usize)], target: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); nodes];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let mut parent = vec![usize::MAX; nodes];
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    let mut toward = vec![usize::MAX; nodes];
    let mut v = target;
    while v != 0 {
        toward[parent[v]] = v;
        v = parent[v];
    }

    enum Step {
        Enter(usize),
        Emit(usize),
    }
    let mut order = Vec::with_capacity(nodes);
    let mut stack = vec![Step::Enter(0)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Emit(v) => order.push(v),
            Step::Enter(v) => {
                if v == target {
                    stack.push(Step::Emit(v));
                } else {
                    order.push(v);
                }
                // pushed in reverse so that the path child is entered last
                if toward[v] != usize::MAX {
                    stack.push(Step::Enter(toward[v]));
                }
                for &c in adj[v].iter().rev() {
                    if c != parent[v] && c != toward[v] && parent[c] == v {
                        stack.push(Step::Enter(c));
                    }
                }
            }
        }
    }
    order
}

/// Splits the items into groups of path length at most `epsilon * deadline`
/// and at most `1 + epsilon * deadline` items each.
pub fn split_tour(instance: &Instance, epsilon: f64) -> Result<Grouping> {
    check_epsilon(epsilon)?;
    let n = instance.n();
    let budget = epsilon * instance.deadline();
    let farthest = farthest_item(instance);
    let (mst, edges) = mst_length(instance);
    let path = hamiltonian_path(n + 1, &edges, farthest + 1);
    debug_assert_eq!(path.len(), n + 1);
    debug_assert_eq!(path.last(), Some(&(farthest + 1)));
    let tour_length: f64 = path.windows(2).map(|w| instance.node_dist(w[0], w[1])).sum();

    let mut groups = Vec::new();
    let mut current = vec![path[1] - 1];
    let mut length = 0.0;
    for w in path[1..].windows(2) {
        let step = instance.node_dist(w[0], w[1]);
        let fits = length + step <= budget && (current.len() + 1) as f64 <= 1.0 + budget;
        if fits {
            current.push(w[1] - 1);
            length += step;
        } else {
            groups.push(finish_group(instance, std::mem::take(&mut current), length));
            current.push(w[1] - 1);
            length = 0.0;
        }
    }
    groups.push(finish_group(instance, current, length));
    groups.sort_by(|a, b| a.remoteness.total_cmp(&b.remoteness));

    Ok(Grouping {
        groups,
        epsilon,
        farthest,
        tour_length,
        mst,
    })
}

fn finish_group(instance: &Instance, items: Vec<usize>, path_length: f64) -> Group {
    let remoteness = items.iter().map(|&i| instance.root_dist(i)).fold(0.0, f64::max);
    Group {
        items,
        remoteness,
        path_length,
    }
}
