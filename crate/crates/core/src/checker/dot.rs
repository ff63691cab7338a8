use std::fmt::{Display, Write};

use super::product::Product;

/// Renders the full product automaton in Graphviz DOT format.
///
/// Accepting product states are drawn as double circles and initial states
/// receive an edge from an invisible start node.
pub fn product_to_dot<A: Copy + PartialEq + Display>(product: &Product<'_, A>) -> String {
    let ts = product.ts();
    let nfa = product.nfa();
    let mut out = String::from("digraph product {\n  rankdir=LR;\n  __start [shape=point];\n");
    for i in 0..product.state_space() {
        let ps = product.state_at(i);
        let shape = if product.is_accepting(ps) { "doublecircle" } else { "circle" };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}, {}\", shape={shape}];",
            ts.state_name(ps.ts_state),
            nfa.state_name(ps.nfa_state)
        );
    }
    for ps in product.initial_states() {
        let _ = writeln!(out, "  __start -> n{};", product.index(ps));
    }
    for i in 0..product.state_space() {
        for (a, t) in product.successors(product.state_at(i)) {
            let _ = writeln!(out, "  n{i} -> n{} [label=\"{a}\"];", product.index(t));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::nfa::{invariant_nfa, Prop};
    use super::super::product::product;
    use super::super::ts::{LabelSet, TransitionSystem};
    use super::*;

    #[test]
    fn dot_marks_accepting_and_initial() {
        let ap = vec!["p".to_string()];
        let mut ts = TransitionSystem::new(vec!['x'], ap.clone()).unwrap();
        let a = ts.add_state("a", LabelSet::empty()).unwrap();
        let b = ts.add_state("b", LabelSet::of(&[0])).unwrap();
        ts.add_transition(a, 'x', b).unwrap();
        ts.add_initial(a).unwrap();
        let nfa = invariant_nfa(Prop::atom(0).not(), ap);
        let p = product(&ts, &nfa).unwrap();
        let dot = product_to_dot(&p);
        assert!(dot.starts_with("digraph product {"));
        assert!(dot.contains("n3 [label=\"b, qF\", shape=doublecircle];"));
        assert!(dot.contains("__start -> n0;"));
        assert!(dot.contains("n0 -> n3 [label=\"x\"];"));
        assert!(dot.trim_end().ends_with('}'));
    }
}
