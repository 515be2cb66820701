#![cfg_attr(not(any(test, feature = "parallel")), no_std)]
extern crate alloc;

pub mod dmod;
pub mod duality;
pub mod exactla;
pub mod forms;
pub mod glue;
pub mod integrate;
pub mod poly;
pub mod rat;
pub mod toricfan;
pub mod weyl;
