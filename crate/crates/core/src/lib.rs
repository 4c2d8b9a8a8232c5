pub mod actions;
pub mod diffop;
pub mod error;
pub mod field;
pub mod groupscheme;
pub mod linalg;
pub mod solver;
pub mod cli;
