pub mod bragg;
pub mod casimir;
pub mod reflect;
pub mod validate;
