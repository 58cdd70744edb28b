pub mod ball;
pub mod catalog;
pub mod error;
pub mod field;
pub mod groebner;
pub mod json;
pub mod matfac;
pub mod matrix;
pub mod module;
pub mod oracle;
pub mod poly;
pub mod star;
