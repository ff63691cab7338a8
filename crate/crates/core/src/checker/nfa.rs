use std::fmt;

use super::ts::LabelSet;

/// Propositional formula over atomic-proposition indices, used both as the
/// invariant and as transition guards of an [`Nfa`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    True,
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn atom(index: usize) -> Self {
        Prop::Atom(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Prop::Not(Box::new(self))
    }

    pub fn and(self, other: Prop) -> Self {
        Prop::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Prop) -> Self {
        Prop::Or(Box::new(self), Box::new(other))
    }

    pub fn eval(&self, label: LabelSet) -> bool {
        match self {
            Prop::True => true,
            Prop::Atom(p) => label.contains(*p),
            Prop::Not(inner) => !inner.eval(label),
            Prop::And(a, b) => a.eval(label) && b.eval(label),
            Prop::Or(a, b) => a.eval(label) || b.eval(label),
        }
    }

    /// Largest atom index mentioned, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Prop::True => None,
            Prop::Atom(p) => Some(*p),
            Prop::Not(inner) => inner.max_atom(),
            Prop::And(a, b) | Prop::Or(a, b) => a.max_atom().max(b.max_atom()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PropDisplay { prop: self, names }
    }
}

struct PropDisplay<'a> {
    prop: &'a Prop,
    names: &'a [String],
}

impl<'a> fmt::Display for PropDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        let sub = |p| PropDisplay { prop: p, names };
        match self.prop {
            Prop::True => write!(f, "true"),
            Prop::Atom(p) => match self.names.get(*p) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "p{p}"),
            },
            Prop::Not(inner) => write!(f, "!{}", sub(inner)),
            Prop::And(a, b) => write!(f, "({} & {})", sub(a), sub(b)),
            Prop::Or(a, b) => write!(f, "({} | {})", sub(a), sub(b)),
        }
    }
}

pub type NfaState = usize;

/// Nondeterministic finite automaton over the alphabet `2^AP`.
///
/// Each edge carries a guard; a letter (label set) moves along every edge
/// whose guard it satisfies. A letter with no satisfied guard has no move.
#[derive(Debug, Clone, PartialEq)]
pub struct Nfa {
    state_names: Vec<String>,
    propositions: Vec<String>,
    edges: Vec<Vec<(Prop, NfaState)>>,
    initial: Vec<NfaState>,
    accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(propositions: Vec<String>) -> Self {
        Self { state_names: Vec::new(), propositions, edges: Vec::new(), initial: Vec::new(), accepting: Vec::new() }
    }

    pub fn add_state(&mut self, name: impl Into<String>, initial: bool, accepting: bool) -> NfaState {
        let id = self.state_names.len();
        self.state_names.push(name.into());
        self.edges.push(Vec::new());
        self.accepting.push(accepting);
        if initial {
            self.initial.push(id);
        }
        id
    }

    pub fn add_edge(&mut self, from: NfaState, guard: Prop, to: NfaState) {
        assert!(from < self.state_names.len() && to < self.state_names.len(), "unknown NFA state");
        self.edges[from].push((guard, to));
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: NfaState) -> &str {
        &self.state_names[q]
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn initial(&self) -> &[NfaState] {
        &self.initial
    }

    pub fn is_accepting(&self, q: NfaState) -> bool {
        self.accepting[q]
    }

    pub fn edges(&self, q: NfaState) -> &[(Prop, NfaState)] {
        &self.edges[q]
    }

    /// Targets reachable from `q` on `letter`, in edge order.
    pub fn step(&self, q: NfaState, letter: LabelSet) -> impl Iterator<Item = NfaState> + '_ {
        self.edges[q].iter().filter(move |(guard, _)| guard.eval(letter)).map(|&(_, to)| to)
    }

    /// Whether some run over `word` ends in an accepting state.
    pub fn accepts(&self, word: &[LabelSet]) -> bool {
        let mut current: Vec<bool> = vec![false; self.state_count()];
        for &q in &self.initial {
            current[q] = true;
        }
        for &letter in word {
            let mut next = vec![false; self.state_count()];
            for q in (0..self.state_count()).filter(|&q| current[q]) {
                for to in self.step(q, letter) {
                    next[to] = true;
                }
            }
            current = next;
        }
        (0..self.state_count()).any(|q| current[q] && self.accepting[q])
    }
}

/// Two-state automaton recognising the bad prefixes of the invariant `[] phi`.
///
/// `q0` loops while `phi` holds and moves to the absorbing accepting state
/// `qF` on the first letter violating it.
pub fn invariant_nfa(phi: Prop, propositions: Vec<String>) -> Nfa {
    let mut nfa = Nfa::new(propositions);
    let q0 = nfa.add_state("q0", true, false);
    let qf = nfa.add_state("qF", false, true);
    nfa.add_edge(q0, phi.clone(), q0);
    nfa.add_edge(q0, phi.not(), qf);
    nfa.add_edge(qf, Prop::True, qf);
    nfa
}
