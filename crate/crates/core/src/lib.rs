//! Team semantics for propositional and modal dependence logics.
//!
//! The crate provides exact model checking and validity procedures for
//! PL, PD, ML, ML(⊻), MDL and EMDL over finite teams, the EMDL → ML(⊻)
//! translation with ⊻-elimination, and dependency-QBF tooling including the
//! reduction from DQBF truth to PD validity.

mod antichain;
pub mod cli;
pub mod dqbf;
pub mod error;
pub mod formula;
pub mod kripke;
pub mod prop_team;
mod settings;
pub mod translate;

pub use error::{Error, Result};
pub use formula::{
    dual, parse_modal, parse_prop, render, to_nnf, Fragment, ModalFormula, PropFormula, PropSymbol,
    RawFormula,
};
pub use settings::Settings;
