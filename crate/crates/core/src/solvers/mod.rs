//! Propagators for the constraint classes kept in the store.

pub mod alldiff;
pub mod atmost;
pub mod exact;
pub mod linear;
pub mod nonlinear;
pub mod real;
