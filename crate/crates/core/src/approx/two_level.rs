//! The two-level caterpillar: a top-level caterpillar at the root location
//! whose branches are one sub-caterpillar per group. Inside a group the
//! vehicle drives from item to item and drops one item per bifurcation.

use crate::approx::split::Grouping;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::{Schedule, VertexId};

pub(crate) fn check_grouping(instance: &Instance, grouping: &Grouping) -> Result<()> {
    let mut seen = vec![false; instance.n()];
    for (g, group) in grouping.groups.iter().enumerate() {
        if group.items.is_empty() {
            return Err(Error::GroupingMismatch(format!("group {g} is empty")));
        }
        for &i in &group.items {
            match seen.get_mut(i) {
                None => return Err(Error::GroupingMismatch(format!("item index {i} out of range"))),
                Some(true) => return Err(Error::GroupingMismatch(format!("item index {i} appears twice"))),
                Some(s) => *s = true,
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::GroupingMismatch(format!(
            "item {} is not in any group",
            instance.items()[i].id
        )));
    }
    Ok(())
}

/// Hangs the sub-caterpillar of one group below `parent`: the `j`-th
/// bifurcation sits at the `j`-th item, which leaves by a zero-length arc;
/// the last item is reached by the continuing tour.
fn attach_group(instance: &Instance, s: &mut Schedule, parent: VertexId, items: &[usize]) {
    let item = |s: &mut Schedule, i: usize| {
        let it = &instance.items()[i];
        s.add_item(it.id.clone(), it.loc)
    };
    if let [only] = items {
        let p = item(s, *only);
        s.add_arc(parent, p);
        return;
    }
    let splits: Vec<VertexId> = items[..items.len() - 1]
        .iter()
        .map(|&i| s.add_aux(instance.items()[i].loc))
        .collect();
    s.add_arc(parent, splits[0]);
    for (j, &b) in splits.iter().enumerate() {
        match splits.get(j + 1) {
            Some(&next) => s.add_arc(b, next),
            None => {
                let last = item(s, items[items.len() - 1]);
                s.add_arc(b, last);
            }
        }
        let leaf = item(s, items[j]);
        s.add_arc(b, leaf);
    }
}

/// Builds the two-level schedule: a top path `r, r_q, ..., r_2` at the root
/// location, where group `i` hangs below `r_max(2, i)`. With a single group
/// its sub-caterpillar hangs directly below the root.
pub fn build_two_level(instance: &Instance, grouping: &Grouping) -> Result<Schedule> {
    check_grouping(instance, grouping)?;
    let groups = &grouping.groups;
    let q = groups.len();
    let root_loc = *instance.root();
    let mut s = Schedule::new(root_loc);
    if q == 1 {
        let root = s.root();
        attach_group(instance, &mut s, root, &groups[0].items);
        return Ok(s);
    }
    // top[k] is r_(q - k)
    let top: Vec<VertexId> = (0..q - 1).map(|_| s.add_aux(root_loc)).collect();
    s.add_arc(s.root(), top[0]);
    for (k, &r_i) in top.iter().enumerate() {
        let i = q - k;
        if i > 2 {
            s.add_arc(r_i, top[k + 1]);
            attach_group(instance, &mut s, r_i, &groups[i - 1].items);
        } else {
            attach_group(instance, &mut s, r_i, &groups[0].items);
            attach_group(instance, &mut s, r_i, &groups[1].items);
        }
    }
    Ok(s)
}
