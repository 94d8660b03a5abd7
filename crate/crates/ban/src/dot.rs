//! DOT export of transition graphs.

use std::fmt::Write;

use crate::config::Config;
use crate::dynamics::{AttractorKind, TransitionGraph, Variant};

/// Render a transition graph in DOT. Nodes are binary-string
/// configurations, attractors become labelled clusters, and the added
/// transition of an augmented graph is drawn bold.
pub fn to_dot(graph: &TransitionGraph) -> String {
    let n = graph.size();
    let mut out = String::new();
    writeln!(
        out,
        "digraph {} {{",
        graph.variant().name().replace('+', "_")
    )
    .unwrap();
    writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    for (a, attractor) in graph.attractors().iter().enumerate() {
        let kind = match attractor.kind {
            AttractorKind::Stable => "Stable",
            AttractorKind::Unstable => "Unstable",
        };
        writeln!(out, "  subgraph cluster_{a} {{").unwrap();
        writeln!(out, "    label=\"{kind}\";").unwrap();
        for x in &attractor.configs {
            writeln!(out, "    \"{x}\";").unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    for x in Config::all(n) {
        if graph.attractor_of(&x).is_none() {
            writeln!(out, "  \"{x}\";").unwrap();
        }
    }
    let added = match graph.variant() {
        Variant::Augmented(t) => Some((t.from, t.to)),
        _ => None,
    };
    for (from, to) in graph.edges() {
        if added == Some((from, to)) {
            writeln!(out, "  \"{from}\" -> \"{to}\" [style=bold];").unwrap();
        } else {
            writeln!(out, "  \"{from}\" -> \"{to}\";").unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
