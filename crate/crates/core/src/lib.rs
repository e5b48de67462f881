//! Computational verification toolkit for the growth of Thompson's group `V`
//! via Grigorchuk-group Schreier graphs.
//!
//! All group actions are right actions: `x·(gh) = (x·g)·h`, and products of
//! group elements read as "first `g`, then `h`".

pub mod construction;
pub mod error;
pub mod grig;
pub mod growth;
pub mod schreier;
pub mod thompson;

pub use error::{BudgetExceeded, Error, Result};
