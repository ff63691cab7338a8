use serde::{Deserialize, Serialize};

use super::nfa::{Nfa, NfaState};
use super::ts::{LabelSet, StateId, TransitionSystem};
use super::CheckerError;

/// A state `<s, q>` of the product of a transition system and an NFA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductState {
    pub ts_state: StateId,
    pub nfa_state: NfaState,
}

/// Lazy product `TS (x) A`; successors are computed on demand.
///
/// `<s, p> -a-> <t, q>` iff `s -a-> t` in the transition system and
/// `p -L(t)-> q` in the automaton. Initial states are `<s0, q>` with
/// `s0` initial and `q0 -L(s0)-> q` for some initial `q0`.
#[derive(Debug, Clone, Copy)]
pub struct Product<'a, A> {
    ts: &'a TransitionSystem<A>,
    nfa: &'a Nfa,
}

pub fn product<'a, A: Copy + PartialEq>(
    ts: &'a TransitionSystem<A>,
    nfa: &'a Nfa,
) -> Result<Product<'a, A>, CheckerError> {
    if ts.propositions() != nfa.propositions() {
        return Err(CheckerError::PropositionMismatch {
            ts: ts.propositions().to_vec(),
            nfa: nfa.propositions().to_vec(),
        });
    }
    Ok(Product { ts, nfa })
}

impl<'a, A: Copy + PartialEq> Product<'a, A> {
    pub fn ts(&self) -> &'a TransitionSystem<A> {
        self.ts
    }

    pub fn nfa(&self) -> &'a Nfa {
        self.nfa
    }

    /// `|S| * |Q|`, the bound on distinct product states.
    pub fn state_space(&self) -> usize {
        self.ts.state_count() * self.nfa.state_count()
    }

    pub fn index(&self, s: ProductState) -> usize {
        s.ts_state * self.nfa.state_count() + s.nfa_state
    }

    pub fn state_at(&self, index: usize) -> ProductState {
        let q = self.nfa.state_count();
        ProductState { ts_state: index / q, nfa_state: index % q }
    }

    pub fn initial_states(&self) -> Vec<ProductState> {
        let mut out = Vec::new();
        for &s0 in self.ts.initial() {
            let letter = self.ts.label(s0);
            for &q0 in self.nfa.initial() {
                for q in self.nfa.step(q0, letter) {
                    let ps = ProductState { ts_state: s0, nfa_state: q };
                    if !out.contains(&ps) {
                        out.push(ps);
                    }
                }
            }
        }
        out
    }

    /// Outgoing product transitions of `s`, in transition-system declaration
    /// order and then NFA edge order.
    pub fn successors(&self, s: ProductState) -> Vec<(A, ProductState)> {
        let mut out = Vec::new();
        for &(action, target) in self.ts.successors(s.ts_state) {
            let letter = self.ts.label(target);
            for q in self.nfa.step(s.nfa_state, letter) {
                let next = ProductState { ts_state: target, nfa_state: q };
                if !out.contains(&(action, next)) {
                    out.push((action, next));
                }
            }
        }
        out
    }

    pub fn is_accepting(&self, s: ProductState) -> bool {
        self.nfa.is_accepting(s.nfa_state)
    }

    /// Builds the whole product as an explicit transition system whose state
    /// `i` is [`Product::state_at`]`(i)`; it is labelled with its NFA
    /// component, so the propositions are the NFA state names.
    pub fn materialize(&self) -> TransitionSystem<A> {
        let props: Vec<String> = (0..self.nfa.state_count()).map(|q| self.nfa.state_name(q).to_string()).collect();
        let mut out = TransitionSystem::new(self.ts.actions().to_vec(), props).expect("NFA state count fits label set");
        for i in 0..self.state_space() {
            let ps = self.state_at(i);
            let name = format!("<{}, {}>", self.ts.state_name(ps.ts_state), self.nfa.state_name(ps.nfa_state));
            out.add_state(name, LabelSet::of(&[ps.nfa_state])).expect("valid label");
        }
        for i in 0..self.state_space() {
            let ps = self.state_at(i);
            for (a, t) in self.successors(ps) {
                out.add_transition(i, a, self.index(t)).expect("valid transition");
            }
        }
        for ps in self.initial_states() {
            out.add_initial(self.index(ps)).expect("valid initial state");
        }
        out
    }
}
