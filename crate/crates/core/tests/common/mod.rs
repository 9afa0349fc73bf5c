#![allow(dead_code)]

pub mod goldens;
pub mod laplace;
