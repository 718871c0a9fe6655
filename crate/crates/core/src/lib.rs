//! Well-definedness preserving conditional term rewriting for a typed
//! set-theoretic first-order language.

pub mod syntax;
pub mod oracle;
pub mod wd;
pub mod kernel;
pub mod rewrite;
pub mod obligations;
pub mod theory;
