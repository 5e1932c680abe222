//! Structural verification of component-and-connector (C&C) models against
//! partial architectural views.
//!
//! A C&C model is a complete component hierarchy with typed, directed ports
//! and connectors. A view is a partial description: a forest of components,
//! ports whose names and types may be unknown, and abstract connectors that
//! stand for chains of concrete connectors. The [`verify`] module decides
//! whether a model satisfies a view and reports one reason per independent
//! defect; the [`witness`] module extracts a minimal model fragment that
//! demonstrates each verdict and renders it as natural-language text.
//!
//! The [`textual`] module provides the `.ccm`/`.ccv`/`.ccw` surface syntax,
//! [`generate`] produces randomized models and views for testing and
//! benchmarking, and [`bench`] is the timing harness behind `ccview bench`.

pub mod bench;
pub mod generate;
pub mod model;
pub mod rng;
pub mod textual;
pub mod verify;
pub mod witness;

pub use model::{
    AbstractConnector, CncModel, CncView, Component, Connector, Direction, ElementRef, Endpoint,
    Port, TypeName, ViewComponent, ViewPort, Violation,
};
pub use verify::{
    HierarchyMismatchKind, InterfaceFailure, Mode, NonSatReason, Specification,
    SpecificationResult, VerificationResult,
};
pub use witness::{Annotation, Witness, WitnessKind};

use thiserror::Error;

/// Errors reported by model queries, witness construction, and generation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no such component: {0}")]
    UnknownComponent(String),
    #[error("no such port: {component}.{port}")]
    UnknownPort { component: String, port: String },
    #[error("duplicate component: {0}")]
    DuplicateComponent(String),
    #[error("empty component set")]
    EmptyComponentSet,
    #[error("model {model} does not satisfy view {view}")]
    NotSatisfied { model: String, view: String },
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
