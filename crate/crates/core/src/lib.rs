//! Symbol calculus for `K_2` of localised local rings.

pub mod abelian;
pub mod error;
pub mod lab;
pub mod ring;
pub mod symbol;

pub use error::{Error, Result};
pub use ring::context::{LocalisationContext, UnitDecomposition};
pub use ring::{Element, RingDescriptor, RingKind, Value};
pub use lab::{Status, VerificationReport};
pub use symbol::{DerivationTrace, RelationInstance, Rule, SymbolExpr, SymbolTerm, SymbolWindow, WindowKind};
