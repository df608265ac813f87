use std::fmt::Write;

use super::Machine;
use crate::symbol::OutputSet;

/// Graphviz rendering. Edge labels are `σ/{γ,…}` or just `σ` when nothing
/// is emitted (`ε` for ε-input); the initial states get an entry arrow from
/// an invisible point node, and transducer final states are double circles.
pub fn to_dot(m: &Machine) -> String {
    let mut out = String::from("digraph machine {\n  rankdir=LR;\n  node [shape=circle];\n");
    let (states, initials, finals, edges) = match m {
        Machine::Mealy(m) => (
            m.state_count(),
            vec![m.initial()],
            Vec::new(),
            m.transitions()
                .map(|(p, s, t)| (p, s.0.to_string(), t.output.clone(), t.target))
                .collect::<Vec<_>>(),
        ),
        Machine::Fst(m) => (
            m.state_count(),
            m.initials().iter().copied().collect(),
            m.finals().iter().copied().collect(),
            m.transitions()
                .iter()
                .map(|t| {
                    let input = t.input.map_or_else(|| "ε".to_owned(), |s| s.0.to_string());
                    let output: OutputSet = t.output.iter().cloned().collect();
                    (t.from, input, output, t.to)
                })
                .collect(),
        ),
    };
    for p in 0..states {
        let shape = if finals.iter().any(|f| f.index() == p) {
            " [shape=doublecircle]"
        } else {
            ""
        };
        writeln!(out, "  {p}{shape};").unwrap();
    }
    for (k, i) in initials.iter().enumerate() {
        writeln!(out, "  init{k} [shape=point];").unwrap();
        writeln!(out, "  init{k} -> {i};").unwrap();
    }
    for (p, input, output, q) in edges {
        let label = if output.is_empty() {
            input
        } else {
            format!("{input}/{output}")
        };
        writeln!(out, "  {p} -> {q} [label=\"{}\"];", escape(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::subset_t;
    use crate::fst::thompson;
    use crate::minimize::{min_comp, trim_sink};
    use crate::regexp::parse;

    #[test]
    fn one_state_loop() {
        let m = min_comp(&subset_t(&thompson(&parse("a*").unwrap())).unwrap());
        let dot = to_dot(&Machine::Mealy(m));
        assert_eq!(
            dot,
            "digraph machine {\n  rankdir=LR;\n  node [shape=circle];\n  0;\n  init0 [shape=point];\n  init0 -> 0;\n  0 -> 0 [label=\"a\"];\n}\n"
        );
    }

    #[test]
    fn trimmed_e3_has_eight_nodes() {
        let e = parse("a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>").unwrap();
        let m = trim_sink(&min_comp(&subset_t(&thompson(&e)).unwrap())).unwrap();
        let dot = to_dot(&Machine::Mealy(m.clone()));
        let nodes = dot
            .lines()
            .filter(|l| {
                l.trim_start()
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_digit())
                    && !l.contains("->")
            })
            .count();
        assert_eq!(nodes, 8);
        assert!(dot.contains("d/{alpha}"));
        assert_eq!(dot, to_dot(&Machine::Mealy(m)));
    }

    #[test]
    fn fst_edges() {
        let dot = to_dot(&Machine::Fst(thompson(&parse("a<A>").unwrap())));
        assert!(dot.contains("[label=\"a/{A}\"]"));
        assert!(dot.contains("[shape=doublecircle]"));
    }
}
