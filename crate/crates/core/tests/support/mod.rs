#![allow(dead_code)]

pub mod ast_gen;
pub mod lang;
