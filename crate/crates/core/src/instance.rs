//! Problem instances.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Location, Metric, MetricJson};

/// An item to be delivered: its identifier and destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: String,
    pub loc: Location,
}

impl Item {
    pub fn new(id: impl Into<String>, loc: Location) -> Self {
        Self { id: id.into(), loc }
    }
}

/// A validated instance: root and item locations in a metric space, the
/// delivery time `delta`, the per-vehicle setup cost `sigma`, and the deadline.
///
/// Algorithms index the instance's locations as nodes: node 0 is the root and
/// node `i + 1` is item `i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct Instance {
    metric: Metric,
    root: Location,
    items: Vec<Item>,
    delta: f64,
    sigma: f64,
    deadline: f64,
    index: HashMap<String, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.metric == other.metric
            && self.root == other.root
            && self.items == other.items
            && self.delta == other.delta
            && self.sigma == other.sigma
            && self.deadline == other.deadline
    }
}

impl Instance {
    pub fn new(metric: Metric, root: Location, items: Vec<Item>, delta: f64, sigma: f64, deadline: f64) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one item".into()));
        }
        if !(delta.is_finite() && delta >= 1.0) {
            return Err(Error::InvalidInstance(format!("delta must be a finite number >= 1, got {delta}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidInstance(format!("sigma must be a finite number >= 0, got {sigma}")));
        }
        if !(deadline.is_finite() && deadline > 0.0) {
            return Err(Error::InvalidInstance(format!("deadline must be a finite positive number, got {deadline}")));
        }
        metric.check_location(&root)?;
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            metric.check_location(&item.loc)?;
            if index.insert(item.id.clone(), i).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate item id {:?}", item.id)));
            }
        }
        Ok(Self {
            metric,
            root,
            items,
            delta,
            sigma,
            deadline,
            index,
        })
    }

    /// Copy of this instance with a different deadline.
    pub fn with_deadline(&self, deadline: f64) -> Result<Self> {
        self.clone().into_deadline(deadline)
    }

    /// Replaces the deadline without copying the metric.
    pub fn into_deadline(mut self, deadline: f64) -> Result<Self> {
        if !(deadline.is_finite() && deadline > 0.0) {
            return Err(Error::InvalidInstance(format!("deadline must be a finite positive number, got {deadline}")));
        }
        self.deadline = deadline;
        Ok(self)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn root(&self) -> &Location {
        &self.root
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Number of items `n`.
    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn deadline(&self) -> f64 {
        self.deadline
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Location of node `v` (0 = root, `i + 1` = item `i`).
    pub fn node_loc(&self, v: usize) -> &Location {
        if v == 0 {
            &self.root
        } else {
            &self.items[v - 1].loc
        }
    }

    /// Distance between two locations of this instance's metric.
    #[inline]
    pub fn dist(&self, a: &Location, b: &Location) -> f64 {
        self.metric.dist(a, b)
    }

    #[inline]
    pub fn node_dist(&self, u: usize, v: usize) -> f64 {
        self.metric.dist(self.node_loc(u), self.node_loc(v))
    }

    /// Distance from the root to item `i`.
    #[inline]
    pub fn root_dist(&self, i: usize) -> f64 {
        self.metric.dist(&self.root, &self.items[i].loc)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Canonical pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    metric: MetricJson,
    root: Location,
    items: Vec<Item>,
    delta: f64,
    sigma: f64,
    deadline: f64,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(json: InstanceJson) -> Result<Self> {
        Instance::new(
            Metric::try_from(json.metric)?,
            json.root,
            json.items,
            json.delta,
            json.sigma,
            json.deadline,
        )
    }
}

impl From<Instance> for InstanceJson {
    fn from(inst: Instance) -> Self {
        InstanceJson {
            metric: MetricJson::from(&inst.metric),
            root: inst.root,
            items: inst.items,
            delta: inst.delta,
            sigma: inst.sigma,
            deadline: inst.deadline,
        }
    }
}
