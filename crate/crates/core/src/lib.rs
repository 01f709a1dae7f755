//! Qualified, proximity-based constraint logic programming.
//!
//! Programs are sets of qualified clauses `A <-d- B1#w1, ..., Bn#wn` over a
//! qualification domain (`B`, `U`, `W` or strict products of them), a
//! constraint domain (Herbrand or linear reals) and a proximity relation
//! between symbols.

pub mod cdom;
pub mod embed;
pub mod frontend;
pub mod proximity;
pub mod qualdom;
pub mod rational;
pub mod semantics;
pub mod sqchl;
pub mod syntax;
