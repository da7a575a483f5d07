// SPDX-License-Identifier: Apache-2.0

//! Graph rewriting with typed, lattice-labeled rules.

pub mod dot;
pub mod graph;
pub mod lattice;
pub mod limits;
pub mod matching;
pub mod rewrite;
pub mod search;
pub mod syntax;
pub mod translation;

pub use graph::{patch_decomposition, Edge, GraphBuilder, GraphError, GraphRef, LGraph, Morphism, Vertex};
pub use lattice::{Label, Lattice, LatticeError};
pub use rewrite::{apply_step, derive, rewrite_all, PbpoRule, Rule, Semantics, StepTrace};
pub use search::{are_isomorphic, enumerate_morphisms, find_isomorphism};
pub use syntax::{ParseError, ParseErrorKind, Workspace};
