use std::fmt;

use serde::{Deserialize, Serialize};

use super::CheckerError;

pub type StateId = usize;

/// Maximum number of atomic propositions a [`LabelSet`] can hold.
pub const MAX_PROPOSITIONS: usize = 64;

/// A subset of the atomic propositions, one bit per proposition index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const fn empty() -> Self {
        Self(0)
    }

    pub fn of(props: &[usize]) -> Self {
        props.iter().fold(Self::empty(), |acc, &p| acc.with(p))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn with(self, prop: usize) -> Self {
        assert!(prop < MAX_PROPOSITIONS, "proposition index {prop} out of range");
        Self(self.0 | (1 << prop))
    }

    pub fn without(self, prop: usize) -> Self {
        Self(self.0 & !(1u64.checked_shl(prop as u32).unwrap_or(0)))
    }

    pub fn contains(self, prop: usize) -> bool {
        prop < MAX_PROPOSITIONS && self.0 & (1 << prop) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_PROPOSITIONS).filter(move |&p| self.contains(p))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite transition system `(S, Act, ->, I, AP, L)`.
///
/// States and propositions are dense indices. Outgoing transitions keep their
/// declaration order, which the searches use as the default sibling order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem<A> {
    state_names: Vec<String>,
    actions: Vec<A>,
    outgoing: Vec<Vec<(A, StateId)>>,
    initial: Vec<StateId>,
    propositions: Vec<String>,
    labels: Vec<LabelSet>,
}

impl<A: Copy + PartialEq> TransitionSystem<A> {
    pub fn new(actions: Vec<A>, propositions: Vec<String>) -> Result<Self, CheckerError> {
        if propositions.len() > MAX_PROPOSITIONS {
            return Err(CheckerError::TooManyPropositions(propositions.len()));
        }
        Ok(Self {
            state_names: Vec::new(),
            actions,
            outgoing: Vec::new(),
            initial: Vec::new(),
            propositions,
            labels: Vec::new(),
        })
    }

    pub fn add_state(&mut self, name: impl Into<String>, label: LabelSet) -> Result<StateId, CheckerError> {
        self.check_label(label)?;
        self.state_names.push(name.into());
        self.outgoing.push(Vec::new());
        self.labels.push(label);
        Ok(self.state_names.len() - 1)
    }

    pub fn add_transition(&mut self, from: StateId, action: A, to: StateId) -> Result<(), CheckerError> {
        self.check_state(from)?;
        self.check_state(to)?;
        if !self.actions.contains(&action) {
            return Err(CheckerError::UnknownAction);
        }
        self.outgoing[from].push((action, to));
        Ok(())
    }

    pub fn add_initial(&mut self, state: StateId) -> Result<(), CheckerError> {
        self.check_state(state)?;
        if !self.initial.contains(&state) {
            self.initial.push(state);
        }
        Ok(())
    }

    pub fn set_label(&mut self, state: StateId, label: LabelSet) -> Result<(), CheckerError> {
        self.check_state(state)?;
        self.check_label(label)?;
        self.labels[state] = label;
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn transition_count(&self) -> usize {
        self.outgoing.iter().map(Vec::len).sum()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn actions(&self) -> &[A] {
        &self.actions
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn proposition_index(&self, name: &str) -> Option<usize> {
        self.propositions.iter().position(|p| p == name)
    }

    pub fn label(&self, s: StateId) -> LabelSet {
        self.labels[s]
    }

    /// Outgoing transitions of `s` in declaration order.
    pub fn successors(&self, s: StateId) -> &[(A, StateId)] {
        &self.outgoing[s]
    }

    /// All transitions as `(source, action, target)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, A, StateId)> + '_ {
        self.outgoing.iter().enumerate().flat_map(|(s, out)| out.iter().map(move |&(a, t)| (s, a, t)))
    }

    fn check_state(&self, s: StateId) -> Result<(), CheckerError> {
        if s < self.state_names.len() {
            Ok(())
        } else {
            Err(CheckerError::UnknownState(s))
        }
    }

    fn check_label(&self, label: LabelSet) -> Result<(), CheckerError> {
        let allowed =
            if self.propositions.len() == MAX_PROPOSITIONS { u64::MAX } else { (1u64 << self.propositions.len()) - 1 };
        if label.bits() & !allowed != 0 {
            return Err(CheckerError::LabelOutsideAp);
        }
        Ok(())
    }
}
