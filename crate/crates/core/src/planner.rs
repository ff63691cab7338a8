//! The fixed task-driven transition system and plan generation.
//!
//! States `s0..s14` are points `d_safe` ahead of possible future robot
//! configurations. Transitions are labelled with tasks:
//!
//! ```text
//! s0 -TL-> s3            s0 -TR-> s4             one turn
//! s0 -TL-> s1 -TL-> s14  s0 -TR-> s2 -TR-> s14   turn around
//! s1 -T0-> s5 -TR-> s7   s5 -TL-> s11            left, travel, turn
//! s2 -T0-> s6 -TL-> s8   s6 -TR-> s12            right, travel, turn
//! ```
//!
//! `s9`, `s10` and `s13` belong to the state set but carry no transitions.
//! A plan is a solution path to a state labelled both `safe` and `horizon`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstraction::{Horizon, SubsetReport, Tier};
use crate::checker::{
    extract_tasks, fdfs_solution, invariant_nfa, product, CheckerError, LabelSet, Prop, StateId, TieBreak,
    TransitionSystem,
};
use crate::scalar::Real;

/// A control task. `T0` drives straight, `TL`/`TR` rotate 90 degrees in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "T0")]
    Straight,
    #[serde(rename = "TL")]
    Left,
    #[serde(rename = "TR")]
    Right,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Straight, Task::Left, Task::Right];

    pub fn mirrored(self) -> Self {
        match self {
            Task::Straight => Task::Straight,
            Task::Left => Task::Right,
            Task::Right => Task::Left,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Task::Straight => "T0",
            Task::Left => "TL",
            Task::Right => "TR",
        }
    }

    pub fn parse(code: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

pub const SAFE: usize = 0;
pub const HORIZON: usize = 1;
pub const STATE_COUNT: usize = 15;

const TRANSITIONS: [(StateId, Task, StateId); 12] = [
    (0, Task::Left, 3),
    (0, Task::Right, 4),
    (0, Task::Left, 1),
    (0, Task::Right, 2),
    (1, Task::Left, 14),
    (2, Task::Right, 14),
    (1, Task::Straight, 5),
    (2, Task::Straight, 6),
    (5, Task::Right, 7),
    (5, Task::Left, 11),
    (6, Task::Left, 8),
    (6, Task::Right, 12),
];

/// Left/right reflection of the task model's states.
pub const MIRROR_STATES: [StateId; STATE_COUNT] = [0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 13, 14];

/// Every task sequence the model can produce.
pub const ADMISSIBLE_PLANS: [&[Task]; 8] = [
    &[Task::Left],
    &[Task::Right],
    &[Task::Left, Task::Left],
    &[Task::Right, Task::Right],
    &[Task::Left, Task::Straight, Task::Right],
    &[Task::Left, Task::Straight, Task::Left],
    &[Task::Right, Task::Straight, Task::Left],
    &[Task::Right, Task::Straight, Task::Right],
];

pub fn is_admissible(tasks: &[Task]) -> bool {
    ADMISSIBLE_PLANS.contains(&tasks)
}

pub fn propositions() -> Vec<String> {
    vec!["safe".to_string(), "horizon".to_string()]
}

/// The task model with `safe` applied to a given set of horizon states.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskTransitionSystem(TransitionSystem<Task>);

impl TaskTransitionSystem {
    pub fn with_safe(safe: &BTreeSet<Horizon>) -> Self {
        let mut ts = TransitionSystem::new(Task::ALL.to_vec(), propositions()).expect("two propositions");
        for s in 0..STATE_COUNT {
            let mut label = LabelSet::empty();
            if let Some(h) = Horizon::from_state(s) {
                label = label.with(HORIZON);
                if safe.contains(&h) {
                    label = label.with(SAFE);
                }
            }
            ts.add_state(format!("s{s}"), label).expect("valid label");
        }
        for (from, task, to) in TRANSITIONS {
            ts.add_transition(from, task, to).expect("fixed table is well formed");
        }
        ts.add_initial(0).expect("s0 exists");
        Self(ts)
    }

    pub fn inner(&self) -> &TransitionSystem<Task> {
        &self.0
    }
}

pub fn build_task_system<T: Real>(report: &SubsetReport<T>) -> TaskTransitionSystem {
    TaskTransitionSystem::with_safe(&report.safe_horizons)
}

/// The invariant `!(safe & horizon)`; its violations are the plans.
pub fn plan_invariant() -> Prop {
    Prop::atom(SAFE).and(Prop::atom(HORIZON)).not()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    /// No safe horizon is reachable. Reports from the model update always
    /// contain one, so this points at a modelling bug.
    #[error("no solution path: no safe horizon state is reachable")]
    NoSolution,
    #[error(transparent)]
    Checker(#[from] CheckerError),
}

/// An executable task sequence and the report it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan<T> {
    pub tasks: Vec<Task>,
    pub terminal_state: Horizon,
    pub created_at: T,
    pub report: SubsetReport<T>,
}

impl<T: Real> Plan<T> {
    /// Distance of the middle straight segment of a three-step plan.
    pub fn lateral_travel(&self) -> Option<T> {
        match self.terminal_state {
            Horizon::S7 | Horizon::S11 => self.report.offsets.dy_plus.map(|v| v.abs()),
            Horizon::S8 | Horizon::S12 => self.report.offsets.dy_minus.map(|v| v.abs()),
            _ => None,
        }
    }

    pub fn tier(&self) -> Tier {
        self.report.tier
    }
}

/// Searches the task model labelled with the given safe set; returns the
/// task sequence and terminal horizon.
pub fn solve(safe: &BTreeSet<Horizon>, policy: &TieBreak) -> Result<(Vec<Task>, Horizon), PlanError> {
    let model = TaskTransitionSystem::with_safe(safe);
    let nfa = invariant_nfa(plan_invariant(), propositions());
    let product = product(model.inner(), &nfa)?;
    let path = fdfs_solution(&product, policy).ok_or(PlanError::NoSolution)?;
    let terminal = Horizon::from_state(path.last().ts_state).ok_or(PlanError::NoSolution)?;
    Ok((extract_tasks(&path), terminal))
}

/// Builds the task model for `report`, checks it and extracts the plan.
pub fn make_plan<T: Real>(report: SubsetReport<T>, policy: &TieBreak) -> Result<Plan<T>, PlanError> {
    let (tasks, terminal_state) = solve(&report.safe_horizons, policy)?;
    Ok(Plan { tasks, terminal_state, created_at: T::zero(), report })
}

/// The tie-break that explores the mirrored model in the order `policy`
/// explores the original one. Declaration order has no mirrored counterpart
/// and is returned unchanged.
pub fn mirrored_policy(policy: &TieBreak) -> TieBreak {
    match policy {
        TieBreak::Declaration => TieBreak::Declaration,
        TieBreak::Seeded { seed, relabel } => {
            let base: Vec<StateId> = relabel.clone().unwrap_or_else(|| (0..STATE_COUNT).collect());
            let composed = (0..STATE_COUNT).map(|s| base[MIRROR_STATES[s]]).collect();
            TieBreak::Seeded { seed: *seed, relabel: Some(composed) }
        }
    }
}
