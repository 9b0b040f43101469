//! Dependently typed call-by-push-value: kernel syntax, judgemental
//! equality, type checking, an abstract machine, translations from a
//! dependently typed source language, and finite models.

pub mod equality;
pub mod laws;
pub mod machine;
pub mod model;
pub mod source;
pub mod surface;
pub mod syntax;
pub mod translate;
pub mod typecheck;
