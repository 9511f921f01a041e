//! Graph embeddings in tensor products of spherical codes.
//!
//! A directed graph is stored as `G = sum x_a x_b^T` over its edges, where
//! the `x_v` are random unit vectors. Edge queries, neighbour decoding,
//! composition, subgraphs and homomorphism checks become matrix algebra on
//! `G`. A Hadamard-Rademacher embedding is provided as a baseline, together
//! with an adjacency-matrix bridge, a seeded Monte-Carlo harness for the
//! noise laws of both schemes, and the `tsgraph` command line.
//!
//! Trials run on rayon by default. Building without the `parallel` feature
//! runs everything on the calling thread with identical results.

pub mod adjacency;
pub mod binding;
pub mod cli;
pub mod codebook;
pub mod envelope;
pub mod experiments;
pub mod error;
pub mod hdc_graph;
pub mod par;
pub mod tables;
pub mod tensor_graph;

pub use error::{Error, Result};
