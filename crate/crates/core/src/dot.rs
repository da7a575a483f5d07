// SPDX-License-Identifier: Apache-2.0

//! Graphviz export.

use std::fmt::Write as _;

use crate::graph::{LGraph, PatchDecomposition};
use crate::lattice::{Label, Lattice};

fn label_name(lat: &Lattice, x: Label) -> &str {
    if x == lat.bottom() {
        "bot"
    } else if x == lat.top() {
        "top"
    } else {
        lat.name(x)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT source for `g`. Nodes read `id:label`. With a patch decomposition,
/// the matched part is green, the context black and patch edges red.
pub fn to_dot(name: &str, g: &LGraph, patch: Option<&PatchDecomposition>) -> String {
    let lat = g.lattice();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    for (i, v) in g.vertices().iter().enumerate() {
        let color = match patch {
            Some(p) if p.match_vertices.contains(&i) => ", color=green",
            Some(_) => ", color=black",
            None => "",
        };
        let text = format!("{}:{}", v.id, label_name(lat, v.label));
        let _ = writeln!(out, "  n{i} [label=\"{}\"{color}];", escape(&text));
    }
    for (i, e) in g.edges().iter().enumerate() {
        let color = match patch {
            Some(p) if p.match_edges.contains(&i) => ", color=green",
            Some(p) if p.patch_edges.contains(&i) => ", color=red",
            Some(_) => ", color=black",
            None => "",
        };
        let text = format!("{}:{}", e.id, label_name(lat, e.label));
        let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"{color}];", e.src, e.tgt, escape(&text));
    }
    out.push_str("}\n");
    out
}
