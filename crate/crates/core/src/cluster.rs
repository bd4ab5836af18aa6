//! Events and clusters of the branching (Poisson-cluster) representation.

use serde::Serialize;

/// One event of a cluster. Its index is its position in [`Cluster::events`];
/// the immigrant sits at index 0 and has no parent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    /// Zero-based direction.
    pub direction: usize,
    /// Index of the parent event, `None` for the immigrant.
    pub parent: Option<usize>,
    /// Absolute arrival time.
    pub time: f64,
    /// Time since the parent's arrival; zero for the immigrant.
    pub birth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub immigrant_direction: usize,
    /// Arrival time of the immigrant.
    pub tau: f64,
    pub events: Vec<Event>,
    /// Time from the immigrant to the last event of the cluster.
    pub length: f64,
    /// Sum of all parent-to-child birth times.
    pub total_birth: f64,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.events.len()
    }

    /// Checks the structural invariants: a single root at index 0 carrying
    /// the immigrant's direction and time, parents preceding children both
    /// in index and time, consistent birth times, and the recorded `length`
    /// and `total_birth` matching the events (with `total_birth >= length`).
    pub fn is_well_formed(&self) -> bool {
        let Some(root) = self.events.first() else {
            return false;
        };
        if root.parent.is_some()
            || root.birth != 0.0
            || root.time != self.tau
            || root.direction != self.immigrant_direction
        {
            return false;
        }
        let mut latest = self.tau;
        let mut births = 0.0;
        for (k, e) in self.events.iter().enumerate().skip(1) {
            let Some(p) = e.parent else { return false };
            if p >= k || e.birth < 0.0 {
                return false;
            }
            let parent_time = self.events[p].time;
            if e.time < parent_time
                || (e.time - (parent_time + e.birth)).abs() > 1e-9 * (1.0 + e.time.abs())
            {
                return false;
            }
            latest = latest.max(e.time);
            births += e.birth;
        }
        let tol = 1e-9 * (1.0 + births);
        (self.length - (latest - self.tau)).abs() <= tol
            && (self.total_birth - births).abs() <= tol
            && self.total_birth + tol >= self.length
    }
}
