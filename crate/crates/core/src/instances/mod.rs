//! Concrete finite instances.

pub mod catalog;
pub mod poly;
pub mod presets;
pub mod spin;

pub use catalog::{
    all_tables, cofinal, dense_metric, find_singleton_universal, is_cofinal, is_dense, lookup_demo,
    lookup_machines, CatalogInstance,
};
pub use poly::{poly_bound_check, PolyCertificate};
pub use spin::{
    build_spin_tcc, field_system, ising, spin_permutation_processing, SpinSystem, SpinTcc,
};
