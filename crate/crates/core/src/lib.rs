//! Universal simulators over target–context computation categories, decided
//! exhaustively on finite instances.

pub mod budget;
pub mod diagonal;
pub mod dsl;
pub mod error;
pub mod finrel;
pub mod instances;
pub mod order;
pub mod report;
pub mod run;
pub mod sample;
pub mod simcat;
pub mod simulator;
pub mod tcc;
pub mod tcfunctor;

pub use budget::{Meter, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use finrel::{FinRel, FinSet, RelSpace};
pub use order::{imitates, MapKind, MapWitness, Preorder};
pub use simcat::{Parsimony, Processing, SimMorphism};
pub use simulator::{Flavor, MonotoneFn, Reduction, Simulator};
pub use tcc::{Ambient, BehaviorStructure, TccInstance};
