//! Left dead ends under misère play: hash-consed forms, the order relation,
//! canonical forms, invariants, factorisation into atoms, enumeration by
//! birthday, and an outcome oracle over general forms.
//!
//! All state lives in an [`Engine`]. Games are [`EndId`] handles into its
//! store; operations take the engine mutably because they fill memo tables.
//!
//! ```
//! use deadend::{format, parse, Engine};
//!
//! let mut e = Engine::new();
//! let g = parse(&mut e, "{|#1,#2}").unwrap();
//! let h = parse(&mut e, "#1 + W2").unwrap();
//! assert!(e.gt(g, h));
//! let c = e.canonical(h);
//! assert_eq!(format(&e, c), "{|W2}");
//! ```

mod engine;
pub mod enumerate;
mod error;
pub mod factor;
mod forms;
mod measures;
mod notation;
pub mod oracle;
mod order;
mod snapshot;
mod store;
mod terminal;

pub use engine::Engine;
pub use enumerate::{Budget, CensusRow, DayPoset, UniquenessReport};
pub use error::{Error, Result};
pub use factor::{AtomRule, Divisors, FactorReport, Factorisation, LengthBounds, UniqueRule};
pub use measures::FlexInfo;
pub use notation::{format, parse};
pub use oracle::{GenId, GenNode, GenStore, Outcome, Winner, Witness};
pub use store::{EndId, EndNode, EndStore};
pub use terminal::TerminalSet;
