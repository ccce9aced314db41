//! Description-logic tableau reasoner whose rule order is set by a
//! priority-queue ToDo list, plus the ontology IO, feature extraction and
//! benchmark labelling used to learn a good order per ontology.

pub mod bench;
pub mod features;
pub mod io;
pub mod kb;
pub mod services;
pub mod tableau;

pub use kb::{Axiom, Concept, KnowledgeBase, RoleName};
pub use tableau::{OrderConfig, Verdict};
